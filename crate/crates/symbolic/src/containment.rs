use rayon::prelude::*;
use serde::Serialize;

use crate::groebner::{buchberger, GroebnerBasis};
use crate::order::MonomialOrder;
use crate::ring::RationalPoly;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Containment {
    pub contained: bool,
    pub basis: GroebnerBasis,
    /// Normal form of each generator of `I`, in input order.
    pub remainders: Vec<RationalPoly>,
}

impl Containment {
    pub fn failures(&self) -> usize {
        self.remainders.iter().filter(|r| !r.is_zero()).count()
    }

    /// The nonzero remainder with the most terms, if any.
    pub fn worst_remainder(&self) -> Option<&RationalPoly> {
        self.remainders.iter().filter(|r| !r.is_zero()).max_by_key(|r| r.len())
    }
}

/// Checks `⟨i_gens⟩ ⊆ ⟨p_gens⟩` by reducing each generator of the first
/// ideal modulo a Gröbner basis of the second.
pub fn verify_containment(
    i_gens: &[RationalPoly],
    p_gens: &[RationalPoly],
    order: MonomialOrder,
) -> Result<Containment> {
    let basis = buchberger(p_gens, order)?;
    let ring = p_gens[0].ring();
    if i_gens.iter().any(|f| f.ring() != ring) {
        return Err(Error::RingMismatch);
    }
    let remainders = i_gens.par_iter().map(|f| basis.reduce(f)).collect::<Result<Vec<_>>>()?;
    let contained = remainders.iter().all(RationalPoly::is_zero);
    Ok(Containment { contained, basis, remainders })
}

/// One row of a verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationRecord {
    pub ideal: String,
    pub prime_index: usize,
    pub pass: bool,
    pub generators: usize,
    pub basis_size: usize,
    pub nonzero_remainders: usize,
    pub worst_remainder: Option<String>,
}

impl VerificationRecord {
    pub fn new(ideal: &str, prime_index: usize, generators: usize, c: &Containment) -> Self {
        VerificationRecord {
            ideal: ideal.to_string(),
            prime_index,
            pass: c.contained,
            generators,
            basis_size: c.basis.len(),
            nonzero_remainders: c.failures(),
            worst_remainder: c.worst_remainder().map(ToString::to_string),
        }
    }
}
