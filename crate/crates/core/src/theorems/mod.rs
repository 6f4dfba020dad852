//! Inequality checkers. Each evaluates both sides of one inequality (or of
//! every link of a chain) and returns [`Certificate`]s carrying the slack.

mod block;
mod scalar;
mod single;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::blockops::{BerConvention, BlockError};
use crate::numlin::{CMatrix, LinalgError};
use crate::rkhs::RkhsError;

pub use block::{check_block, check_block_all};
pub use scalar::check_scalar;
pub use single::{check_axiom, check_single};

/// Default relative check tolerance: a certificate holds when
/// `slack ≥ −tol·(1 + |rhs|)`.
pub const DEFAULT_CHECK_TOL: f64 = 1e-9;
/// Absolute floor of the check tolerance.
pub const CHECK_TOL_FLOOR: f64 = 1e-12;

/// Named scalar parameters of a check (`r`, `p`, `t`, `alpha`, ...).
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoremError {
    #[error("bad parameters for {id}: {reason}")]
    BadParams { id: TheoremId, reason: String },
    #[error("{id} is not a {expected} checker")]
    WrongKind { id: TheoremId, expected: &'static str },
    #[error("input shape not admissible for {id}: {reason}")]
    Shape { id: TheoremId, reason: String },
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Rkhs(#[from] RkhsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which checker entry point a theorem id belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Scalar,
    Single,
    Axiom,
    Block,
}

macro_rules! theorem_ids {
    ($($variant:ident => $name:literal, $kind:ident;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum TheoremId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl TheoremId {
            pub const ALL: &'static [TheoremId] = &[$(TheoremId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(TheoremId::$variant => $name,)*
                }
            }

            pub fn kind(self) -> CheckKind {
                match self {
                    $(TheoremId::$variant => CheckKind::$kind,)*
                }
            }
        }
    };
}

theorem_ids! {
    L21a => "L21a", Block;
    L21b => "L21b", Block;
    L21c => "L21c", Single;
    Ineq1 => "INEQ1", Block;
    Young2 => "YOUNG2", Scalar;
    I37 => "I37", Scalar;
    I38 => "I38", Scalar;
    S310 => "S310", Scalar;
    T24a => "T24a", Block;
    T24b => "T24b", Block;
    C25a => "C25a", Block;
    C25b => "C25b", Block;
    R26 => "R26", Block;
    C27 => "C27", Block;
    C28 => "C28", Block;
    T29 => "T29", Block;
    C210 => "C210", Block;
    T31 => "T31", Block;
    T32 => "T32", Single;
    R33 => "R33", Single;
    C34 => "C34", Block;
    C35 => "C35", Block;
    T36 => "T36", Block;
    T37 => "T37", Block;
    P39 => "P39", Single;
    R310 => "R310", Single;
    T311Proof => "T311_proof", Single;
    T311Stmt => "T311_stmt", Single;
    T312Proof => "T312_proof", Single;
    T312Stmt => "T312_stmt", Single;
    L22a => "L22a", Single;
    L22b => "L22b", Single;
    L23 => "L23", Single;
    AxHom => "AX_HOM", Axiom;
    AxSub => "AX_SUB", Axiom;
    AxNorm => "AX_NORM", Axiom;
}

impl TheoremId {
    /// Checkers whose every certificate is informational.
    pub fn is_informational(self) -> bool {
        matches!(self, TheoremId::T311Stmt | TheoremId::T312Stmt | TheoremId::C35)
    }

    /// Conventions a block checker runs at; the first is the gating one.
    pub fn conventions(self) -> &'static [BerConvention] {
        use BerConvention::*;
        match self {
            TheoremId::T24a | TheoremId::T24b | TheoremId::T29 | TheoremId::C210 => &[Pair, Joint],
            TheoremId::L21a | TheoremId::L21b | TheoremId::T36 | TheoremId::T37 => {
                &[Joint, Pair, DirectSum]
            }
            TheoremId::Ineq1
            | TheoremId::C25a
            | TheoremId::C25b
            | TheoremId::R26
            | TheoremId::C27
            | TheoremId::C28
            | TheoremId::T31
            | TheoremId::C34 => &[Joint, Pair],
            _ => &[],
        }
    }

    /// Mode of a certificate produced at `conv` (`None` for convention-free links).
    pub fn mode_at(self, conv: Option<BerConvention>) -> Mode {
        if self.is_informational() {
            return Mode::Informational;
        }
        match (conv, self.conventions().first()) {
            (Some(c), Some(&gate)) if c != gate => Mode::Informational,
            _ => Mode::Gating,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown theorem id `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Gating,
    Informational,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Gating => "gating",
            Mode::Informational => "informational",
        }
    }
}

/// Where the extremal value was attained and, for campaign draws, the trial seed.
///
/// Block witnesses are `(j₁, j₂)`; a direct-sum witness uses `usize::MAX` for
/// the component that is zero.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem_id: TheoremId,
    /// Position in a chain `a ≤ b ≤ c`; `0` for a single inequality.
    pub link: usize,
    pub convention: Option<BerConvention>,
    pub mode: Mode,
    pub params: Params,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub witness: Witness,
    pub input_digest: String,
}

/// `max(tol·(1 + |rhs|), 1e-12)`.
pub fn tolerance(rhs: f64, tol: f64) -> f64 {
    (tol * (1.0 + rhs.abs())).max(CHECK_TOL_FLOOR)
}

impl Certificate {
    /// Recomputes `holds` under a different relative tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.holds = self.slack >= -tolerance(self.rhs, tol);
        self
    }

    pub fn is_gating(&self) -> bool {
        self.mode == Mode::Gating
    }

    /// Gating certificate that fails its check.
    pub fn is_violation(&self) -> bool {
        self.is_gating() && !self.holds
    }
}

/// Shared bookkeeping while a checker assembles its certificates.
pub(crate) struct CertBuilder<'a> {
    pub id: TheoremId,
    pub params: &'a Params,
    pub digest: String,
}

impl CertBuilder<'_> {
    pub fn cert(
        &self,
        link: usize,
        conv: Option<BerConvention>,
        lhs: f64,
        rhs: f64,
        indices: Vec<usize>,
    ) -> Certificate {
        let slack = rhs - lhs;
        Certificate {
            theorem_id: self.id,
            link,
            convention: conv,
            mode: self.id.mode_at(conv),
            params: self.params.clone(),
            lhs,
            rhs,
            slack,
            holds: slack >= -tolerance(rhs, DEFAULT_CHECK_TOL),
            witness: Witness { indices, seed: None },
            input_digest: self.digest.clone(),
        }
    }
}

/// SHA-256 over the bit patterns of every input.
pub(crate) struct InputDigest(Sha256);

impl InputDigest {
    pub fn new(id: TheoremId, params: &Params) -> Self {
        let mut h = Sha256::new();
        h.update(id.as_str().as_bytes());
        for (k, v) in params {
            h.update(k.as_bytes());
            h.update(v.to_bits().to_le_bytes());
        }
        Self(h)
    }

    pub fn matrix(mut self, m: &CMatrix<f64>) -> Self {
        self.0.update((m.rows() as u64).to_le_bytes());
        self.0.update((m.cols() as u64).to_le_bytes());
        for z in m.as_slice() {
            self.0.update(z.re.to_bits().to_le_bytes());
            self.0.update(z.im.to_bits().to_le_bytes());
        }
        self
    }

    pub fn reals(mut self, xs: &[f64]) -> Self {
        self.0.update((xs.len() as u64).to_le_bytes());
        for x in xs {
            self.0.update(x.to_bits().to_le_bytes());
        }
        self
    }

    pub fn finish(self) -> String {
        self.0
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub(crate) fn param(id: TheoremId, params: &Params, name: &str) -> Result<f64, TheoremError> {
    match params.get(name) {
        Some(v) if v.is_finite() => Ok(*v),
        Some(v) => Err(TheoremError::BadParams {
            id,
            reason: format!("{name} = {v} is not finite"),
        }),
        None => Err(TheoremError::BadParams {
            id,
            reason: format!("missing parameter {name}"),
        }),
    }
}

pub(crate) fn require(id: TheoremId, ok: bool, reason: impl Into<String>) -> Result<(), TheoremError> {
    if ok {
        Ok(())
    } else {
        Err(TheoremError::BadParams {
            id,
            reason: reason.into(),
        })
    }
}

/// Checks `r ≥ 1`.
pub(crate) fn exponent_r(id: TheoremId, params: &Params) -> Result<f64, TheoremError> {
    let r = param(id, params, "r")?;
    require(id, r >= 1.0, format!("r = {r} must be at least 1"))?;
    Ok(r)
}

/// Checks `v ∈ [0, 1]`.
pub(crate) fn unit_param(id: TheoremId, params: &Params, name: &str) -> Result<f64, TheoremError> {
    let v = param(id, params, name)?;
    require(id, (0.0..=1.0).contains(&v), format!("{name} = {v} outside [0, 1]"))?;
    Ok(v)
}

/// Builds a [`Params`] map from name/value pairs.
pub fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}
