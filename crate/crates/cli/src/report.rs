//! JSON report shapes. The field set is fixed; complex values become
//! `[re, im]` pairs and real ones plain numbers.

use geomean_core::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            Scalar::Real(z.re)
        } else {
            Scalar::Complex([z.re, z.im])
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Scalar::Real(v) => write!(f, "{v}"),
            Scalar::Complex([re, im]) if im < 0.0 => write!(f, "{re}-{}i", -im),
            Scalar::Complex([re, im]) => write!(f, "{re}+{im}i"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernsteinSummary {
    pub max_order: usize,
    /// Entry `k - 1` is the grid minimum of `(-1)^{k-1} G^(k)`.
    pub per_order_min: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Engine {
    pub tolerance: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub sequence: Vec<f64>,
    pub arithmetic: Scalar,
    pub geometric_direct: Scalar,
    pub geometric_repr: Scalar,
    pub abs_diff: f64,
    pub ag_gap: Scalar,
    pub bernstein: BernsteinSummary,
    pub engine: Engine,
}

impl Report {
    pub fn to_text(&self) -> String {
        let seq = self.sequence.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        let minima = self.bernstein.per_order_min.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let mut row = |k: &str, v: String| out.push_str(&format!("{k:<18}{v}\n"));
        row("sequence", seq);
        row("arithmetic", self.arithmetic.to_string());
        row("geometric_direct", self.geometric_direct.to_string());
        row("geometric_repr", self.geometric_repr.to_string());
        row("abs_diff", format!("{:e}", self.abs_diff));
        row("ag_gap", self.ag_gap.to_string());
        row("bernstein", format!("{} up to order {}", if self.bernstein.pass { "pass" } else { "FAIL" }, self.bernstein.max_order));
        row("per_order_min", minima);
        row("tolerance", format!("{:e}", self.engine.tolerance));
        row("nodes", self.engine.nodes.to_string());
        out
    }
}
