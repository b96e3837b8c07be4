//! Time-sampled concentration traces and CSV export.

use std::io::{self, Write};

use super::ReactionNetwork;

/// Uniformly sampled concentrations: one series per species (substrate and
/// product of every pair) and one per enzyme (effective concentration).
#[derive(Debug, Clone)]
pub struct Trace {
    times: Vec<f64>,
    names: Vec<String>,
    /// Column-major: series[i][k] is the value of column i at times[k].
    series: Vec<Vec<f64>>,
    n_species: usize,
    /// (substrate column, product column) per pair, for conservation checks.
    pair_columns: Vec<(usize, usize)>,
}

impl Trace {
    pub(crate) fn for_network(network: &ReactionNetwork, capacity: usize) -> Self {
        let mut names = Vec::new();
        let mut pair_columns = Vec::new();
        for p in network.pairs() {
            pair_columns.push((names.len(), names.len() + 1));
            names.push(p.substrate_name.clone());
            names.push(p.product_name.clone());
        }
        let n_species = names.len();
        for e in network.enzymes() {
            names.push(e.name.clone());
        }
        let series = vec![Vec::with_capacity(capacity); names.len()];
        Self {
            times: Vec::with_capacity(capacity),
            names,
            series,
            n_species,
            pair_columns,
        }
    }

    pub(crate) fn record(
        &mut self,
        network: &ReactionNetwork,
        index: usize,
        t: f64,
        state: &[f64],
    ) {
        debug_assert_eq!(self.times.len(), index);
        self.times.push(t);
        for (pair, &s) in state.iter().enumerate() {
            let (sc, pc) = self.pair_columns[pair];
            self.series[sc].push(s);
            self.series[pc].push(1.0 - s);
        }
        for i in 0..network.enzymes().len() {
            let v = network.enzyme_concentration(i, state, t);
            self.series[self.n_species + i].push(v);
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn dt(&self) -> f64 {
        if self.times.len() >= 2 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }

    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(&self.series[i])
    }

    /// Column by index: (name, values). Index order matches the CSV layout
    /// after the time column.
    pub fn column(&self, i: usize) -> Option<(&str, &[f64])> {
        Some((self.names.get(i)?.as_str(), &self.series[i]))
    }

    /// Value of a column at the sample nearest to `t` (grid lookup).
    pub fn value_at(&self, name: &str, t: f64) -> Option<f64> {
        let col = self.series(name)?;
        if self.times.is_empty() {
            return None;
        }
        let dt = self.dt();
        if dt == 0.0 {
            return col.first().copied();
        }
        let i = (((t - self.times[0]) / dt).round().max(0.0) as usize).min(col.len() - 1);
        Some(col[i])
    }

    /// (substrate column name, product column name) per conserved pair.
    pub fn pair_column_names(&self) -> Vec<(&str, &str)> {
        self.pair_columns
            .iter()
            .map(|&(a, b)| (self.names[a].as_str(), self.names[b].as_str()))
            .collect()
    }

    /// Append a precomputed column (used for outputs wired straight to a
    /// primary input, which have no species of their own).
    pub fn append_computed(&mut self, name: &str, values: Vec<f64>) -> bool {
        if self.names.iter().any(|n| n == name) || values.len() != self.times.len() {
            return false;
        }
        self.names.push(name.to_string());
        self.series.push(values);
        true
    }

    /// Append a copy of an existing column under a new name (used to expose
    /// primary outputs like `Q` in exported traces).
    pub fn append_alias(&mut self, alias: &str, source: &str) -> bool {
        let Some(i) = self.names.iter().position(|n| n == source) else {
            return false;
        };
        if self.names.iter().any(|n| n == alias) {
            return false;
        }
        let col = self.series[i].clone();
        self.names.push(alias.to_string());
        self.series.push(col);
        true
    }

    /// CSV with header `t,<species...>,<enzyme...>`, one row per sample,
    /// 12 significant digits, LF line endings.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write!(w, "t")?;
        for n in &self.names {
            write!(w, ",{n}")?;
        }
        w.write_all(b"\n")?;
        for (k, t) in self.times.iter().enumerate() {
            write!(w, "{}", fmt_sig12(*t))?;
            for col in &self.series {
                write!(w, ",{}", fmt_sig12(col[k]))?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// 12 significant digits, scientific notation; deterministic across runs.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{integrate, not_gate_network, IntegratorOptions, Schedule};

    #[test]
    fn csv_header_and_shape() {
        let net = not_gate_network(
            1.0,
            0.1,
            Schedule::constant(0.0).unwrap(),
            1.0,
            0.1,
            0.2,
            0.0,
        )
        .unwrap();
        let trace = integrate(&net, 0.0, 1.0, 0.5, &IntegratorOptions::default()).unwrap();
        let csv = trace.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,S1,S1p,E1,P1");
        assert_eq!(csv.lines().count(), 1 + 3); // header + samples at 0, 0.5, 1.0
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn alias_appends_copy() {
        let net = not_gate_network(
            1.0,
            0.1,
            Schedule::constant(0.0).unwrap(),
            1.0,
            0.1,
            0.2,
            0.25,
        )
        .unwrap();
        let mut trace = integrate(&net, 0.0, 1.0, 0.5, &IntegratorOptions::default()).unwrap();
        assert!(trace.append_alias("Q", "S1"));
        assert!(!trace.append_alias("Q", "S1"));
        assert_eq!(trace.series("Q").unwrap(), trace.series("S1").unwrap());
        assert!(trace.to_csv_string().starts_with("t,S1,S1p,E1,P1,Q"));
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(fmt_sig12(0.25), "2.50000000000e-1");
        assert_eq!(fmt_sig12(1.0), "1.00000000000e0");
    }
}
