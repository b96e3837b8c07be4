//! Boolean expression trees and a small text parser for them.

use std::collections::BTreeSet;
use std::fmt;

use super::CircuitError;

/// Expression tree over input variables, NOT, AND, OR.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BooleanExpr {
    Var(String),
    Not(Box<BooleanExpr>),
    And(Box<BooleanExpr>, Box<BooleanExpr>),
    Or(Box<BooleanExpr>, Box<BooleanExpr>),
}

impl BooleanExpr {
    pub fn var(name: &str) -> Self {
        BooleanExpr::Var(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BooleanExpr) -> Self {
        BooleanExpr::Not(Box::new(e))
    }

    pub fn and(a: BooleanExpr, b: BooleanExpr) -> Self {
        BooleanExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BooleanExpr, b: BooleanExpr) -> Self {
        BooleanExpr::Or(Box::new(a), Box::new(b))
    }

    /// Variables referenced, sorted and deduplicated.
    pub fn variables(&self) -> Vec<String> {
        let mut set = BTreeSet::new();
        self.collect_vars(&mut set);
        set.into_iter().collect()
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            BooleanExpr::Var(v) => {
                out.insert(v.clone());
            }
            BooleanExpr::Not(e) => e.collect_vars(out),
            BooleanExpr::And(a, b) | BooleanExpr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Tree depth with variables at depth 0.
    pub fn depth(&self) -> usize {
        match self {
            BooleanExpr::Var(_) => 0,
            BooleanExpr::Not(e) => 1 + e.depth(),
            BooleanExpr::And(a, b) | BooleanExpr::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            BooleanExpr::Var(_) => 1,
            BooleanExpr::Not(e) => 1 + e.node_count(),
            BooleanExpr::And(a, b) | BooleanExpr::Or(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }
}

impl fmt::Display for BooleanExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanExpr::Var(v) => write!(f, "{v}"),
            BooleanExpr::Not(e) => write!(f, "NOT({e})"),
            BooleanExpr::And(a, b) => write!(f, "AND({a},{b})"),
            BooleanExpr::Or(a, b) => write!(f, "OR({a},{b})"),
        }
    }
}

/// Parse `NOT(x)`, `AND(a,b)`, `OR(a,b)` with arbitrary nesting; bare
/// identifiers are variables. Case-insensitive keywords.
pub fn parse_expr(text: &str) -> Result<BooleanExpr, CircuitError> {
    let mut p = Parser {
        chars: text.char_indices().peekable(),
        text,
    };
    let e = p.expr()?;
    p.skip_ws();
    if let Some(&(i, c)) = p.chars.peek() {
        return Err(CircuitError::Parse(format!(
            "unexpected `{c}` at byte {i} in expression `{text}`"
        )));
    }
    Ok(e)
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(&(_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn ident(&mut self) -> Result<String, CircuitError> {
        self.skip_ws();
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_alphanumeric() || c == '_' {
                s.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        if s.is_empty() {
            let at = self
                .chars
                .peek()
                .map(|&(i, c)| format!("`{c}` at byte {i}"))
                .unwrap_or_else(|| "end of input".to_string());
            return Err(CircuitError::Parse(format!(
                "expected identifier, found {at} in `{}`",
                self.text
            )));
        }
        Ok(s)
    }

    fn expect(&mut self, want: char) -> Result<(), CircuitError> {
        self.skip_ws();
        match self.chars.next() {
            Some((_, c)) if c == want => Ok(()),
            Some((i, c)) => Err(CircuitError::Parse(format!(
                "expected `{want}`, found `{c}` at byte {i} in `{}`",
                self.text
            ))),
            None => Err(CircuitError::Parse(format!(
                "expected `{want}`, found end of input in `{}`",
                self.text
            ))),
        }
    }

    fn expr(&mut self) -> Result<BooleanExpr, CircuitError> {
        let name = self.ident()?;
        self.skip_ws();
        let is_call = matches!(self.chars.peek(), Some(&(_, '(')));
        match (name.to_ascii_uppercase().as_str(), is_call) {
            ("NOT", true) => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(BooleanExpr::not(e))
            }
            ("AND", true) | ("OR", true) => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                Ok(if name.eq_ignore_ascii_case("AND") {
                    BooleanExpr::and(a, b)
                } else {
                    BooleanExpr::or(a, b)
                })
            }
            (_, true) => Err(CircuitError::Parse(format!(
                "unknown operator `{name}` in `{}`",
                self.text
            ))),
            (_, false) => Ok(BooleanExpr::Var(name)),
        }
    }
}

/// Deterministic expression corpus over variables `a`, `b`, `c`.
///
/// Bottom-up enumeration of all NOT/AND/OR combinations up to `max_depth`,
/// keeping one smallest representative expression per distinct truth table.
/// This covers every Boolean function reachable at that depth while keeping
/// the corpus small enough to simulate exhaustively.
pub fn expression_corpus(max_depth: usize) -> Vec<BooleanExpr> {
    const VARS: [&str; 3] = ["a", "b", "c"];
    // Truth table over the 8 assignments of (a, b, c), packed into a u8:
    // bit i is the value at the assignment where a = i&1, b = i>>1&1, c = i>>2&1.
    fn mask_var(v: usize) -> u8 {
        let mut m = 0u8;
        for i in 0..8 {
            if (i >> v) & 1 == 1 {
                m |= 1 << i;
            }
        }
        m
    }

    // reps[mask] = Some((expr, depth, node_count))
    let mut reps: Vec<Option<(BooleanExpr, usize, usize)>> = vec![None; 256];
    let mut order: Vec<u8> = Vec::new();
    for (v, name) in VARS.iter().enumerate() {
        let m = mask_var(v);
        reps[m as usize] = Some((BooleanExpr::var(name), 0, 1));
        order.push(m);
    }

    for depth in 1..=max_depth {
        // Candidates from representatives of strictly smaller depth.
        let pool: Vec<(u8, BooleanExpr, usize)> = order
            .iter()
            .filter_map(|&m| {
                reps[m as usize]
                    .as_ref()
                    .filter(|(_, d, _)| *d < depth)
                    .map(|(e, _, n)| (m, e.clone(), *n))
            })
            .collect();
        let mut fresh: Vec<(u8, BooleanExpr, usize)> = Vec::new();
        for (m, e, n) in &pool {
            fresh.push((!m, BooleanExpr::not(e.clone()), n + 1));
        }
        for (i, (ma, ea, na)) in pool.iter().enumerate() {
            for (mb, eb, nb) in pool.iter().skip(i) {
                fresh.push((
                    ma & mb,
                    BooleanExpr::and(ea.clone(), eb.clone()),
                    na + nb + 1,
                ));
                fresh.push((
                    ma | mb,
                    BooleanExpr::or(ea.clone(), eb.clone()),
                    na + nb + 1,
                ));
            }
        }
        for (m, e, n) in fresh {
            let slot = &mut reps[m as usize];
            let better = match slot {
                None => true,
                Some((_, _, existing_n)) => n < *existing_n,
            };
            if better {
                if slot.is_none() {
                    order.push(m);
                }
                *slot = Some((e, depth, n));
            }
        }
    }

    order
        .into_iter()
        .map(|m| reps[m as usize].take().map(|(e, _, _)| e).unwrap())
        .collect()
}
