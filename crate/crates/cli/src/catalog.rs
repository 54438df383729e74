use serde::Serialize;

/// One runnable check.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub module: &'static str,
    /// What a passing case establishes.
    pub statement: &'static str,
    /// Expected wall-clock budget for the default grid, in milliseconds.
    pub default_budget_ms: u64,
}

const fn entry(name: &'static str, module: &'static str, statement: &'static str, secs: u64) -> CatalogEntry {
    CatalogEntry {
        name,
        module,
        statement,
        default_budget_ms: secs * 1000,
    }
}

pub const CATALOG: &[CatalogEntry] = &[
    entry("qde-char", "qde", "the p-fold product satisfies the quadratic relation in p-th powers, exactly", 30),
    entry("qde-spectrum", "qde", "product spectrum at zeta_p equals the spectrum at p-th powered parameters", 10),
    entry("frobenius-pole", "frobenius", "intertwiner coefficients have no Phi_p(q) in their denominators", 300),
    entry("frobenius-conj", "frobenius", "intertwiner conjugates the powered operator into the p-fold product at zeta_p", 300),
    entry("tpp0-closed", "frobenius", "scalar intertwiner at zeta_p against the exponential product formula", 60),
    entry("bethe-solve", "bethe", "Bethe equations: full solution count with small residuals", 30),
    entry("bethe-frobenius", "bethe", "powered Bethe spectrum matches the product at zeta_p; powered roots are p-th roots", 10),
    entry("yangyang-grad", "vertex", "Bethe roots are critical points of the Yang-Yang function", 30),
    entry("vertex-asymptotics", "vertex", "scalar vertex tends to dilogarithms near 1 and near zeta_p", 5),
    entry("pcurv-structure", "pcurvature", "nabla^p is the p-curvature plus the identity times d^p", 120),
    entry("pcurv-log", "pcurvature", "logarithmic form (z nabla)^p - z nabla equals z^p nabla^p", 120),
    entry("stirling", "pcurvature", "Stirling row p vanishes mod p strictly inside", 1),
    entry("pi-lemma", "pcurvature", "(1 + pi a + pi^2 b)^p = 1 + pi^p (a^p - a) mod pi^(p+1)", 30),
    entry("pencil-spectrum", "pcurvature", "char polys of z^p C_p and (s^p - s) z^p A(z^p) agree", 300),
    entry("root-reduction", "pcurvature", "lambda^p digit of the product at zeta_p against the p-curvature (exploratory)", 300),
    entry("coh-limit", "qde", "first-order term of the operator near q = 1 against the connection matrix", 1),
];

pub fn find(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}
