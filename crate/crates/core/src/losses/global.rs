/// Whether gradients flow back through a loss term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientPath {
    Open,
    Closed,
}

/// Viewing-condition labels of the reference and query images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainPair {
    pub d: String,
    pub d_prime: String,
}

impl DomainPair {
    pub fn new(d: impl Into<String>, d_prime: impl Into<String>) -> Self {
        Self { d: d.into(), d_prime: d_prime.into() }
    }

    pub fn same_domain(&self) -> bool {
        self.d == self.d_prime
    }
}

/// Combined loss value with the gradient paths a trainer must honor. The
/// descriptor path through the AP term is always open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalLoss {
    pub value: f64,
    pub repeatability: GradientPath,
    pub reliability_output: GradientPath,
}

/// Same-domain loss: repeatability plus reliability.
pub fn global_loss(rep: f64, rel: f64) -> GlobalLoss {
    GlobalLoss { value: rep + rel, repeatability: GradientPath::Open, reliability_output: GradientPath::Open }
}

/// Domain-adapted loss. Across domains the repeatability term is switched
/// off and no gradient reaches the reliability output, so only the
/// descriptors learn from the pair.
pub fn adapted_global_loss(rep: f64, rel: f64, pair: &DomainPair) -> GlobalLoss {
    if pair.same_domain() {
        global_loss(rep, rel)
    } else {
        GlobalLoss { value: rel, repeatability: GradientPath::Closed, reliability_output: GradientPath::Closed }
    }
}
