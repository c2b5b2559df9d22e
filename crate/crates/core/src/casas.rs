//! The Casas-Alvero constructions and top-level verifications.
//!
//! For a monic degree-`d` polynomial the conjecture asks that nontrivial
//! `gcd(f, f_i)` for every `i = 1..d-1` forces `f = (X-α)^d`. The working
//! reformulation: the conjecture holds in degree `d` over an algebraically
//! closed field iff for every index tuple `(j_1..j_{d-1})` in `[1,d]` the
//! sequence
//!
//! ```text
//! S_{d-1}(j_1..j_{d-1}) = Φ#_{j_1}(HD^0 x_1⋯x_{d-1}), ..., Φ#_{j_{d-1}}(HD^{d-2} x_1⋯x_{d-1})
//! ```
//!
//! is regular in `K[x_1..x_{d-1}]`. This module builds those sequences, the
//! truncated variants used by the homological argument, runs the per-degree
//! exhaustive scans, and cross-checks prime-field failures against a direct
//! counterexample search.

use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::{primes_up_to, Field, FieldDescriptor, PrimeField};
use crate::groebner::{self, GroebnerError};
use crate::poly::{
    elementary_symmetric, hasse_derivation_multi, phi_endo, product_of_variables, resultant,
    swap_endo, Homogeneity, MultiPoly, PolyError, Ring, RingEndo, UniPoly,
};

/// Errors from sequence construction and conjecture checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CasasError {
    BadIndex(String),
    BadDegree(String),
    NotMonic,
    /// A truncated sequence was requested with an unreduced index (some
    /// `j_i = n`); call [`reduce_indices`] first.
    UnreducedIndices { position: usize },
    Poly(PolyError),
    Groebner(GroebnerError),
}

impl std::fmt::Display for CasasError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CasasError::BadIndex(m) => write!(f, "bad index: {m}"),
            CasasError::BadDegree(m) => write!(f, "bad degree: {m}"),
            CasasError::NotMonic => write!(f, "polynomial must be monic"),
            CasasError::UnreducedIndices { position } => write!(
                f,
                "index j_{} equals n; reduce the tuple with reduce_indices first",
                position + 1
            ),
            CasasError::Poly(e) => write!(f, "{e}"),
            CasasError::Groebner(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CasasError {}

impl From<PolyError> for CasasError {
    fn from(e: PolyError) -> Self {
        CasasError::Poly(e)
    }
}

impl From<GroebnerError> for CasasError {
    fn from(e: GroebnerError) -> Self {
        CasasError::Groebner(e)
    }
}

/// Which of the two sequence families a [`PolySequence`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SequenceKind {
    /// `S_{d-1}(j_1..j_{d-1})` in `R_{d-1}`; element `i` has degree `d-i`.
    Full,
    /// `Ŝ_n(j_1..j_{n-1})` in `R_n`; element `i` has degree `n+1-i`.
    Truncated,
}

/// An ordered sequence of homogeneous polynomials together with the data it
/// regenerates from: the degree parameter and the index tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySequence<F: Field> {
    kind: SequenceKind,
    /// Conjecture degree `d` for [`SequenceKind::Full`], ambient `n` for
    /// [`SequenceKind::Truncated`].
    param: usize,
    indices: Vec<usize>,
    elements: Vec<MultiPoly<F>>,
    ring: Ring<F>,
}

impl<F: Field> PolySequence<F> {
    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn param(&self) -> usize {
        self.param
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn elements(&self) -> &[MultiPoly<F>] {
        &self.elements
    }

    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Degrees of the elements, in order.
    pub fn degrees(&self) -> Vec<u32> {
        self.elements
            .iter()
            .map(|e| match e.homogeneity() {
                Homogeneity::Homogeneous(d) => d,
                _ => unreachable!("sequence elements are homogeneous by construction"),
            })
            .collect()
    }
}

/// Builds `S_{d-1}(j_1..j_{d-1})` in `R_{d-1}`: element `i` is
/// `Φ#_{d-1,j_i}(HD^{i-1}(x_1⋯x_{d-1}))`, homogeneous of degree `d-i`.
///
/// Requires `d ≥ 3` and each `j_i` in `[1, d]`.
pub fn build_s<F: Field>(
    field: &F,
    d: usize,
    indices: &[usize],
) -> Result<PolySequence<F>, CasasError> {
    if d < 3 {
        return Err(CasasError::BadDegree(format!("d = {d} must be at least 3")));
    }
    if indices.len() != d - 1 {
        return Err(CasasError::BadIndex(format!(
            "expected {} indices, got {}",
            d - 1,
            indices.len()
        )));
    }
    let ring = Ring::new(d - 1, field.clone());
    let xprod = product_of_variables(&ring);
    let mut elements = Vec::with_capacity(d - 1);
    for (i, &j) in indices.iter().enumerate() {
        if j < 1 || j > d {
            return Err(CasasError::BadIndex(format!(
                "j_{} = {j} outside [1, {d}]",
                i + 1
            )));
        }
        let hd = hasse_derivation_multi(&xprod, i as u32);
        let phi = phi_endo(&ring, j)?;
        elements.push(phi.apply(&hd)?);
    }
    Ok(PolySequence {
        kind: SequenceKind::Full,
        param: d,
        indices: indices.to_vec(),
        elements,
        ring,
    })
}

/// Builds the truncated sequence `Ŝ_n(j_1..j_{n-1})` in `R_n`: element `i`
/// is `Φ#_{n,j_i}(HD^{i-1}(x_1⋯x_n))`, linear in `x_n`.
///
/// Requires `n ≥ 2`, each `j_i` in `[1, n+1]` and no `j_i = n` (the reduced
/// form produced by [`reduce_indices`]).
pub fn build_s_hat<F: Field>(
    field: &F,
    n: usize,
    indices: &[usize],
) -> Result<PolySequence<F>, CasasError> {
    if n < 2 {
        return Err(CasasError::BadDegree(format!("n = {n} must be at least 2")));
    }
    if indices.len() != n - 1 {
        return Err(CasasError::BadIndex(format!(
            "expected {} indices, got {}",
            n - 1,
            indices.len()
        )));
    }
    let ring = Ring::new(n, field.clone());
    let xprod = product_of_variables(&ring);
    let mut elements = Vec::with_capacity(n - 1);
    for (i, &j) in indices.iter().enumerate() {
        if j < 1 || j > n + 1 {
            return Err(CasasError::BadIndex(format!(
                "j_{} = {j} outside [1, {}]",
                i + 1,
                n + 1
            )));
        }
        if j == n {
            return Err(CasasError::UnreducedIndices { position: i });
        }
        let hd = hasse_derivation_multi(&xprod, i as u32);
        let phi = phi_endo(&ring, j)?;
        elements.push(phi.apply(&hd)?);
    }
    Ok(PolySequence {
        kind: SequenceKind::Truncated,
        param: n,
        indices: indices.to_vec(),
        elements,
        ring,
    })
}

/// The last element of the degree-(n+1) sequence: `Φ#_{n,j_n}(HD^{n-1}(x_1⋯x_n))`,
/// a linear form (the image of `e_1`). Multiplication by it is the map whose
/// injectivity the homological argument establishes.
pub fn s_hat_last<F: Field>(
    field: &F,
    n: usize,
    j_n: usize,
) -> Result<MultiPoly<F>, CasasError> {
    if n < 2 {
        return Err(CasasError::BadDegree(format!("n = {n} must be at least 2")));
    }
    if j_n < 1 || j_n > n + 1 {
        return Err(CasasError::BadIndex(format!(
            "j_n = {j_n} outside [1, {}]",
            n + 1
        )));
    }
    let ring = Ring::new(n, field.clone());
    let hd = hasse_derivation_multi(&product_of_variables(&ring), n as u32 - 1);
    Ok(phi_endo(&ring, j_n)?.apply(&hd)?)
}

/// The index tuple for the `R_{n-1}` sequence of leading coefficients:
/// `j ↦ j` for `j ≤ n-1` and `n+1 ↦ n` (the identity automorphism changes
/// its label when the ring loses a variable).
pub fn modified_indices(n: usize, indices: &[usize]) -> Vec<usize> {
    indices
        .iter()
        .map(|&j| if j == n + 1 { n } else { j })
        .collect()
}

/// Outcome of the index reduction that removes `j_i = n` from the first
/// `n-1` slots of a degree-(n+1) index tuple.
#[derive(Debug, Clone)]
pub struct ReducedIndices<F: Field> {
    /// The transposition `τ_{ln}` applied, when one was needed.
    pub swap: Option<RingEndo<F>>,
    /// The swapped-in variable index `l`, when a swap was needed.
    pub swap_index: Option<usize>,
    /// The full reduced tuple `(j_1..j_n)`: no entry among the first `n-1`
    /// equals `n`.
    pub full: Vec<usize>,
    /// The `R_{n-1}` tuple for the leading-coefficient sequence: first
    /// `n-1` reduced entries with `n+1` replaced by `n`.
    pub rn1: Vec<usize>,
}

/// Reduces a full index tuple `(j_1..j_n)` with entries in `[1, n+1]`: picks
/// the smallest `l` in `[1, n]` missing from the first `n-1` entries and
/// swaps `x_l` with `x_n` when some `j_i = n`, relabelling indices through
/// the transposition. An `l` always exists because `n-1` values cannot cover
/// `n` slots.
pub fn reduce_indices<F: Field>(
    field: &F,
    n: usize,
    indices: &[usize],
) -> Result<ReducedIndices<F>, CasasError> {
    if indices.len() != n {
        return Err(CasasError::BadIndex(format!(
            "expected {n} indices, got {}",
            indices.len()
        )));
    }
    for (i, &j) in indices.iter().enumerate() {
        if j < 1 || j > n + 1 {
            return Err(CasasError::BadIndex(format!(
                "j_{} = {j} outside [1, {}]",
                i + 1,
                n + 1
            )));
        }
    }
    let head = &indices[..n - 1];
    let needs_swap = head.contains(&n);
    if !needs_swap {
        return Ok(ReducedIndices {
            swap: None,
            swap_index: None,
            full: indices.to_vec(),
            rn1: modified_indices(n, head),
        });
    }
    let l = (1..=n)
        .find(|l| !head.contains(l))
        .expect("n-1 values cannot cover n slots");
    let ring = Ring::new(n, field.clone());
    let tau = swap_endo(&ring, l, n)?;
    // conjugation by the transposition: n ↦ l, l ↦ n, everything else fixed
    let relabel = |j: usize| -> usize {
        if j == n {
            l
        } else if j == l {
            n
        } else {
            j
        }
    };
    let full: Vec<usize> = indices.iter().map(|&j| relabel(j)).collect();
    let rn1 = modified_indices(n, &full[..n - 1]);
    Ok(ReducedIndices {
        swap: Some(tau),
        swap_index: Some(l),
        full,
        rn1,
    })
}

/// Checks the recursion that splits off the last variable, as an exact
/// polynomial identity in `R_n`:
///
/// ```text
/// Φ#_{n,j}(HD^{i-1} x_1⋯x_n)
///   = factor · Φ#_{n-1,j'}(HD^{i-1} x_1⋯x_{n-1}) + Φ#_{n-1,j'}(HD^{i-2} x_1⋯x_{n-1})
/// ```
///
/// with `factor = x_n - x_j`, `j' = j` for `j ≤ n-1` and `factor = x_n`,
/// `j' = n` (the identity of `R_{n-1}`) for `j = n+1`. The `i = 1` case
/// takes `HD^{-1} := 0`, which the elementary-symmetric identification
/// forces (`e_n` in `n-1` variables vanishes).
pub fn verify_recursion<F: Field>(
    field: &F,
    n: usize,
    i: usize,
    j: usize,
) -> Result<bool, CasasError> {
    if n < 2 {
        return Err(CasasError::BadDegree(format!("n = {n} must be at least 2")));
    }
    if i < 1 || i > n {
        return Err(CasasError::BadIndex(format!("i = {i} outside [1, {n}]")));
    }
    if j < 1 || j > n + 1 || j == n {
        return Err(CasasError::BadIndex(format!(
            "j = {j} outside [1, {}] \\ {{{n}}}",
            n + 1
        )));
    }
    let rn = Ring::new(n, field.clone());
    let rn1 = Ring::new(n - 1, field.clone());

    let lhs = phi_endo(&rn, j)?.apply(&hasse_derivation_multi(
        &product_of_variables(&rn),
        i as u32 - 1,
    ))?;

    let j_small = if j == n + 1 { n } else { j };
    let phi_small = phi_endo(&rn1, j_small)?;
    let xprod_small = product_of_variables(&rn1);
    let a = phi_small
        .apply(&hasse_derivation_multi(&xprod_small, i as u32 - 1))?
        .extend_to(&rn)?;
    let b = if i >= 2 {
        phi_small
            .apply(&hasse_derivation_multi(&xprod_small, i as u32 - 2))?
            .extend_to(&rn)?
    } else {
        MultiPoly::zero(&rn)
    };

    let xn = MultiPoly::variable(&rn, n - 1);
    let factor = if j == n + 1 {
        xn
    } else {
        xn.sub(&MultiPoly::variable(&rn, j - 1))?
    };
    let rhs = factor.mul(&a)?.add(&b)?;
    Ok(lhs == rhs)
}

/// Pure-power classification of a monic polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PowerStatus {
    PurePower,
    NotPurePower,
}

/// Per-polynomial conjecture check: the gcd conditions and the pure-power
/// classification.
#[derive(Debug, Clone)]
pub struct ConjectureVerdict<F: Field> {
    pub polynomial: UniPoly<F>,
    /// `gcd(f, f_i)` nontrivial, for `i = 1..d-1` in order. The gcd with a
    /// vanishing derivative counts as nontrivial.
    pub gcd_nontrivial: Vec<bool>,
    pub status: PowerStatus,
    /// The repeated root when `f = (X - α)^d`.
    pub root: Option<F::Elem>,
}

impl<F: Field> ConjectureVerdict<F> {
    pub fn all_gcds_nontrivial(&self) -> bool {
        self.gcd_nontrivial.iter().all(|&b| b)
    }

    pub fn is_pure_power(&self) -> bool {
        self.status == PowerStatus::PurePower
    }

    /// A counterexample to the conjecture statement: every gcd nontrivial
    /// yet not a pure power.
    pub fn is_counterexample(&self) -> bool {
        self.all_gcds_nontrivial() && !self.is_pure_power()
    }
}

/// Runs the conjecture's gcd conditions on a monic polynomial of degree at
/// least 1 and decides whether it is a `d`-th power of a linear factor.
///
/// When the characteristic does not divide `d`, the candidate root is
/// `-a_{d-1}/d`. When it does, every monic pure power over `F_p` has its
/// root in `F_p` (Frobenius fixes the coefficients, hence the unique root),
/// so scanning the prime field is conclusive.
pub fn check_polynomial<F: Field>(f: &UniPoly<F>) -> Result<ConjectureVerdict<F>, CasasError> {
    let field = f.field().clone();
    if !f.is_monic() {
        return Err(CasasError::NotMonic);
    }
    let d = f.degree().expect("monic implies nonzero");
    if d < 1 {
        return Err(CasasError::BadDegree("degree must be at least 1".into()));
    }

    let mut gcd_nontrivial = Vec::with_capacity(d.saturating_sub(1));
    for i in 1..d {
        let fi = f.hasse_derivative(i as u32);
        let nontrivial = if fi.is_zero() {
            true
        } else {
            f.gcd(&fi)?.degree().is_some_and(|g| g >= 1)
        };
        gcd_nontrivial.push(nontrivial);
    }

    let d_in_field = field.from_i64(d as i64);
    let (status, root) = if !field.is_zero(&d_in_field) {
        // root of a pure power must be -a_{d-1}/d
        let a = f.coeff(d - 1);
        let alpha = field.div(&field.neg(&a), &d_in_field).expect("d invertible");
        if is_power_of_linear(f, &alpha, d) {
            (PowerStatus::PurePower, Some(alpha))
        } else {
            (PowerStatus::NotPurePower, None)
        }
    } else {
        // characteristic divides d: scan the prime field for the root
        let candidates = field
            .all_elements()
            .expect("characteristic divides d only over a finite field");
        match candidates.into_iter().find(|alpha| is_power_of_linear(f, alpha, d)) {
            Some(alpha) => (PowerStatus::PurePower, Some(alpha)),
            None => (PowerStatus::NotPurePower, None),
        }
    };

    Ok(ConjectureVerdict {
        polynomial: f.clone(),
        gcd_nontrivial,
        status,
        root,
    })
}

fn is_power_of_linear<F: Field>(f: &UniPoly<F>, alpha: &F::Elem, d: usize) -> bool {
    let field = f.field();
    if !field.is_zero(&f.eval(alpha)) {
        return false;
    }
    let linear = UniPoly::new(field, vec![field.neg(alpha), field.one()]);
    linear.pow(d as u32) == *f
}

/// The resultants `Res(f, f_i)` for `i = 1..d-1`. A vanishing Hasse
/// derivative contributes 0, matching the gcd convention. All entries
/// vanish exactly when `f` satisfies the conjecture's gcd condition.
pub fn resultant_profile<F: Field>(f: &UniPoly<F>) -> Result<Vec<F::Elem>, CasasError> {
    let field = f.field().clone();
    if !f.is_monic() {
        return Err(CasasError::NotMonic);
    }
    let d = f.degree().expect("monic implies nonzero");
    let mut out = Vec::with_capacity(d.saturating_sub(1));
    for i in 1..d {
        let fi = f.hasse_derivative(i as u32);
        if fi.is_zero() {
            out.push(field.zero());
        } else {
            out.push(resultant(f, &fi)?);
        }
    }
    Ok(out)
}

/// One failing tuple of an exhaustive degree scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailingTuple {
    pub tuple: Vec<usize>,
    /// First graded degree where the Hilbert function diverges from the
    /// complete-intersection prediction.
    pub witness_degree: u32,
}

/// Result of the all-tuples regularity scan for one conjecture degree.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeReport {
    pub d: usize,
    pub field: FieldDescriptor,
    pub tuples_checked: usize,
    /// Failing tuples in ascending lexicographic order.
    pub failing: Vec<FailingTuple>,
    pub passed: bool,
}

impl DegreeReport {
    /// The lexicographically smallest failing tuple.
    pub fn witness(&self) -> Option<&FailingTuple> {
        self.failing.first()
    }
}

/// Decodes scan index `k` into the tuple with given digit count and radix,
/// most significant digit first, entries shifted to `1..=radix`.
fn tuple_from_index(mut k: usize, digits: usize, radix: usize) -> Vec<usize> {
    let mut tuple = vec![1usize; digits];
    for slot in (0..digits).rev() {
        tuple[slot] = k % radix + 1;
        k /= radix;
    }
    tuple
}

/// Exhaustively verifies the regular-sequence reformulation for conjecture degree
/// `d`: `S_{d-1}(J)` must be regular for all `d^{d-1}` tuples `J` in
/// `[1, d]^{d-1}`. Failing tuples are counterexample witnesses over the
/// field's algebraic closure.
///
/// Tuples are scanned in parallel; the report is assembled in lexicographic
/// order regardless of worker scheduling.
pub fn verify_degree<F: Field>(field: &F, d: usize) -> Result<DegreeReport, CasasError> {
    if d < 3 {
        return Err(CasasError::BadDegree(format!("d = {d} must be at least 3")));
    }
    let digits = d - 1;
    let total = d.pow(digits as u32);
    let failures: Vec<FailingTuple> = (0..total)
        .into_par_iter()
        .filter_map(|k| {
            let tuple = tuple_from_index(k, digits, d);
            let seq = build_s(field, d, &tuple).expect("indices in range");
            let verdict =
                groebner::is_regular_sequence(seq.elements()).expect("homogeneous by construction");
            if verdict.regular {
                None
            } else {
                Some(FailingTuple {
                    tuple,
                    witness_degree: verdict.witness_degree.unwrap_or(0),
                })
            }
        })
        .collect();
    let mut failing = failures;
    failing.sort_by(|a, b| a.tuple.cmp(&b.tuple));
    Ok(DegreeReport {
        d,
        field: field.descriptor(),
        tuples_checked: total,
        passed: failing.is_empty(),
        failing,
    })
}

/// A bad prime with its witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct FailingPrime {
    pub prime: u64,
    /// Lexicographically smallest failing index tuple.
    pub tuple: Vec<usize>,
    pub witness_degree: u32,
    /// Monic counterexample found by the independent brute-force search
    /// over `F_p`, rendered in the polynomial grammar. `None` when the
    /// search space exceeded the bound or the counterexample lives in an
    /// extension field.
    pub brute_force_witness: Option<String>,
    /// Whether the brute-force search ran.
    pub cross_checked: bool,
}

/// Report of a bad-prime scan for one degree.
#[derive(Debug, Clone, Serialize)]
pub struct BadPrimeReport {
    pub d: usize,
    pub prime_bound: u64,
    pub primes_scanned: Vec<u64>,
    pub failing: Vec<FailingPrime>,
    /// Primes where the regularity scan failed but the `F_p`-rational
    /// brute force found nothing: the counterexample lives only over an
    /// extension field. Recorded as unresolved, not as an error.
    pub unresolved_extension_cases: Vec<u64>,
}

impl BadPrimeReport {
    pub fn failing_primes(&self) -> Vec<u64> {
        self.failing.iter().map(|f| f.prime).collect()
    }
}

/// Search-space cap for the brute-force cross check: enumerate the `p^d`
/// monic polynomials only when that count stays within this bound.
pub const BRUTE_FORCE_BOUND: u64 = 10_000_000;

/// Enumerates monic degree-`d` polynomials over `F_p` in lexicographic
/// coefficient order `(a_0, a_1, .., a_{d-1})`, constant coefficient most
/// significant, and returns the first conjecture counterexample: all gcds
/// nontrivial but not a pure power.
pub fn brute_force_counterexample(fp: &PrimeField, d: usize) -> Option<UniPoly<PrimeField>> {
    let p = fp.modulus();
    let total = (p as u128).checked_pow(d as u32)?;
    let mut k: u128 = 0;
    while k < total {
        // least significant digit of k is a_{d-1}, so the constant
        // coefficient is the most significant position of the ordering
        let mut digits = k;
        let mut coeffs = vec![0u64; d + 1];
        coeffs[d] = 1;
        for t in (0..d).rev() {
            coeffs[t] = (digits % p as u128) as u64;
            digits /= p as u128;
        }
        let f = UniPoly::new(fp, coeffs);
        let verdict = check_polynomial(&f).expect("monic by construction");
        if verdict.is_counterexample() {
            return Some(f);
        }
        k += 1;
    }
    None
}

/// Scans primes `p ≤ prime_bound`: a prime is bad for `d` when the
/// exhaustive regularity scan over `F_p` fails. Every failure is
/// double-checked by the brute-force counterexample search whenever
/// `p^d ≤` [`BRUTE_FORCE_BOUND`].
pub fn scan_bad_primes(d: usize, prime_bound: u64) -> Result<BadPrimeReport, CasasError> {
    if d < 3 {
        return Err(CasasError::BadDegree(format!("d = {d} must be at least 3")));
    }
    let primes = primes_up_to(prime_bound);
    let mut failing = Vec::new();
    let mut unresolved = Vec::new();
    for &p in primes.iter() {
        let fp = PrimeField::new(p).expect("prime by construction");
        let report = verify_degree(&fp, d)?;
        if report.passed {
            continue;
        }
        let witness = report.witness().expect("failed scan has a witness").clone();
        let within_bound = (p as u128).checked_pow(d as u32).map(|t| t <= BRUTE_FORCE_BOUND as u128)
            == Some(true);
        let brute = if within_bound {
            brute_force_counterexample(&fp, d)
        } else {
            None
        };
        if within_bound && brute.is_none() {
            unresolved.push(p);
        }
        failing.push(FailingPrime {
            prime: p,
            tuple: witness.tuple,
            witness_degree: witness.witness_degree,
            brute_force_witness: brute.as_ref().map(crate::poly::render_unipoly),
            cross_checked: within_bound,
        });
    }
    Ok(BadPrimeReport {
        d,
        prime_bound,
        primes_scanned: primes,
        failing,
        unresolved_extension_cases: unresolved,
    })
}

/// All reduced truncated-index tuples for ambient dimension `n`: entries
/// range over `[1, n+1] \ {n}`, ascending lexicographically.
pub fn reduced_tuples(n: usize) -> Vec<Vec<usize>> {
    let choices: Vec<usize> = (1..=n + 1).filter(|&j| j != n).collect();
    let digits = n - 1;
    let total = choices.len().pow(digits as u32);
    (0..total)
        .map(|k| {
            tuple_from_index(k, digits, choices.len())
                .into_iter()
                .map(|i| choices[i - 1])
                .collect()
        })
        .collect()
}

/// The elementary-symmetric shortcut used everywhere in tests: in `R_n`,
/// `HD^{i}(x_1⋯x_n) = e_{n-i}`.
pub fn hd_of_xprod<F: Field>(ring: &Ring<F>, i: u32) -> MultiPoly<F> {
    let n = ring.nvars;
    debug_assert_eq!(
        hasse_derivation_multi(&product_of_variables(ring), i),
        elementary_symmetric(ring, n - i as usize)
    );
    elementary_symmetric(ring, n - i as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Rationals;
    use crate::poly::render_unipoly;

    fn qp(ring: &Ring<Rationals>, s: &str) -> MultiPoly<Rationals> {
        MultiPoly::parse(ring, s).unwrap()
    }

    #[test]
    fn build_s_examples() {
        let s = build_s(&Rationals, 3, &[1, 2]).unwrap();
        let r = s.ring().clone();
        assert_eq!(s.elements()[0], qp(&r, "x1^2 - x1*x2"));
        assert_eq!(s.elements()[1], qp(&r, "x1 - 2*x2"));

        let s33 = build_s(&Rationals, 3, &[3, 3]).unwrap();
        assert_eq!(s33.elements()[0], qp(&r, "x1*x2"));
        assert_eq!(s33.elements()[1], qp(&r, "x1 + x2"));

        // element degrees of build_S(5, J) are (4,3,2,1)
        let s5 = build_s(&Rationals, 5, &[2, 5, 1, 3]).unwrap();
        assert_eq!(s5.degrees(), vec![4, 3, 2, 1]);

        assert!(build_s(&Rationals, 2, &[1]).is_err());
        assert!(build_s(&Rationals, 3, &[0, 1]).is_err());
        assert!(build_s(&Rationals, 3, &[1, 4]).is_err());
    }

    #[test]
    fn build_s_hat_examples() {
        let s = build_s_hat(&Rationals, 2, &[1]).unwrap();
        let r2 = s.ring().clone();
        assert_eq!(s.elements()[0], qp(&r2, "x1^2 - x1*x2"));

        // every element has x_n-degree exactly 1 for n <= 5
        for n in 2..=5usize {
            for tuple in reduced_tuples(n) {
                let s = build_s_hat(&Rationals, n, &tuple).unwrap();
                for e in s.elements() {
                    assert_eq!(e.xn_degree(), Some(1), "n={n}, tuple={tuple:?}");
                }
            }
        }

        // unreduced index rejected with direction to reduce_indices
        assert_eq!(
            build_s_hat(&Rationals, 3, &[3, 1]).unwrap_err(),
            CasasError::UnreducedIndices { position: 0 }
        );
    }

    #[test]
    fn leading_coefficients_are_the_smaller_sequence() {
        // λ applied elementwise to Ŝ_n(J) is S_{n-1}(J') under the index
        // modification, for all reduced tuples, n <= 5
        for n in 2..=5usize {
            let rn1 = Ring::new(n - 1, Rationals);
            let xprod_small = product_of_variables(&rn1);
            for tuple in reduced_tuples(n) {
                let s_hat = build_s_hat(&Rationals, n, &tuple).unwrap();
                let modified = modified_indices(n, &tuple);
                for (i, e) in s_hat.elements().iter().enumerate() {
                    let lead = e.coeff_of_xn_pow(1).restrict_to(&rn1).unwrap();
                    let expect = phi_endo(&rn1, modified[i])
                        .unwrap()
                        .apply(&hasse_derivation_multi(&xprod_small, i as u32))
                        .unwrap();
                    assert_eq!(lead, expect, "n={n}, tuple={tuple:?}, i={i}");
                }
            }
        }
    }

    #[test]
    fn reduce_indices_examples() {
        // n = 3, (3,1,2): l = 2, swap τ_{23}, head becomes (2,1), j_3: 2 ↦ 3
        let red = reduce_indices(&Rationals, 3, &[3, 1, 2]).unwrap();
        assert!(red.swap.is_some());
        assert_eq!(red.swap_index, Some(2));
        assert_eq!(red.full, vec![2, 1, 3]);
        assert_eq!(red.rn1, vec![2, 1]);

        // already reduced: unchanged
        let red2 = reduce_indices(&Rationals, 3, &[1, 4, 3]).unwrap();
        assert!(red2.swap.is_none());
        assert_eq!(red2.full, vec![1, 4, 3]);
        // n+1 = 4 maps to n = 3 in the R_{n-1} tuple
        assert_eq!(red2.rn1, vec![1, 3]);
    }

    #[test]
    fn reduction_matches_the_swap_action() {
        // τ_{ln}(Φ#_{j_i}(HD^{i-1} x)) equals the element with the relabelled index
        let field = Rationals;
        for n in [3usize, 4] {
            let rn = Ring::new(n, field);
            let xprod = product_of_variables(&rn);
            let all: Vec<Vec<usize>> = {
                // a few tuples containing n
                let mut v = Vec::new();
                for a in 1..=n + 1 {
                    for b in 1..=n + 1 {
                        if n == 3 {
                            v.push(vec![a, b, 2]);
                        }
                    }
                }
                if n == 4 {
                    v.push(vec![4, 1, 2, 5]);
                    v.push(vec![1, 4, 4, 3]);
                }
                v
            };
            for tuple in all {
                let red = reduce_indices(&field, n, &tuple).unwrap();
                let Some(tau) = &red.swap else { continue };
                for (i, (&j_old, &j_new)) in
                    tuple.iter().zip(red.full.iter()).enumerate().take(n - 1)
                {
                    let hd = hasse_derivation_multi(&xprod, i as u32);
                    let old_elem = phi_endo(&rn, j_old).unwrap().apply(&hd).unwrap();
                    let new_elem = phi_endo(&rn, j_new).unwrap().apply(&hd).unwrap();
                    assert_eq!(
                        tau.apply(&old_elem).unwrap(),
                        new_elem,
                        "n={n}, tuple={tuple:?}, i={i}"
                    );
                }
            }
        }
    }

    #[test]
    fn recursion_small_cases() {
        assert!(verify_recursion(&Rationals, 3, 2, 1).unwrap());
        // j = n+1 with second summand zero at i = 1
        assert!(verify_recursion(&Rationals, 3, 1, 4).unwrap());
        assert!(verify_recursion(&Rationals, 2, 1, 1).unwrap());
        assert!(verify_recursion(&Rationals, 2, 2, 3).unwrap());
        // j = n rejected
        assert!(verify_recursion(&Rationals, 3, 1, 3).is_err());
    }

    #[test]
    fn check_polynomial_examples() {
        let q = Rationals;
        // (X-2)^3: pure power with root 2
        let f = crate::poly::parse_unipoly(&q, "(x1-2)^3").unwrap();
        let v = check_polynomial(&f).unwrap();
        assert!(v.all_gcds_nontrivial());
        assert!(v.is_pure_power());
        assert_eq!(v.root, Some(q.from_i64(2)));
        assert!(!v.is_counterexample());

        // X^3 - 1: gcd at i = 1 trivial (f_1 = 3X^2 and X does not divide f)
        let g = crate::poly::parse_unipoly(&q, "x1^3 - 1").unwrap();
        let vg = check_polynomial(&g).unwrap();
        assert!(!vg.gcd_nontrivial[0]);
        assert!(!vg.is_counterexample());

        // X^3 + X^2 over F_2: the counterexample witness
        let f2 = PrimeField::new(2).unwrap();
        let h = crate::poly::parse_unipoly(&f2, "x1^3 + x1^2").unwrap();
        let vh = check_polynomial(&h).unwrap();
        assert!(vh.all_gcds_nontrivial());
        assert!(!vh.is_pure_power());
        assert!(vh.is_counterexample());

        // non-monic is rejected
        let bad = crate::poly::parse_unipoly(&q, "2*x1^2").unwrap();
        assert_eq!(check_polynomial(&bad).unwrap_err(), CasasError::NotMonic);
    }

    #[test]
    fn pure_powers_in_every_characteristic() {
        // easy direction: (X - α)^d has every gcd nontrivial, d <= 8
        let q = Rationals;
        for d in 1..=8u32 {
            for a in [-2i64, 0, 3] {
                let lin = UniPoly::new(&q, vec![q.from_i64(-a), q.one()]);
                let v = check_polynomial(&lin.pow(d)).unwrap();
                assert!(v.all_gcds_nontrivial());
                assert!(v.is_pure_power());
                assert_eq!(v.root, Some(q.from_i64(a)));
            }
        }
        let f3 = PrimeField::new(3).unwrap();
        for d in 1..=8u32 {
            for a in 0..3u64 {
                let lin = UniPoly::new(&f3, vec![f3.neg(&a), 1]);
                let v = check_polynomial(&lin.pow(d)).unwrap();
                assert!(v.all_gcds_nontrivial(), "d={d}, a={a}");
                assert!(v.is_pure_power(), "d={d}, a={a}");
            }
        }
    }

    #[test]
    fn resultant_profile_examples() {
        let q = Rationals;
        let f = crate::poly::parse_unipoly(&q, "(x1-5)^4").unwrap();
        let prof = resultant_profile(&f).unwrap();
        assert!(prof.iter().all(|r| q.is_zero(r)));

        let g = crate::poly::parse_unipoly(&q, "x1^3 - 1").unwrap();
        let pg = resultant_profile(&g).unwrap();
        assert!(!q.is_zero(&pg[0]));
    }

    #[test]
    fn verify_degree_three() {
        let rep = verify_degree(&Rationals, 3).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.tuples_checked, 9);

        let f2 = PrimeField::new(2).unwrap();
        let rep2 = verify_degree(&f2, 3).unwrap();
        assert!(!rep2.passed);
        assert!(rep2.witness().is_some());

        assert!(verify_degree(&Rationals, 2).is_err());
    }

    #[test]
    fn brute_force_finds_the_f2_witness_first() {
        let f2 = PrimeField::new(2).unwrap();
        let w = brute_force_counterexample(&f2, 3).unwrap();
        assert_eq!(render_unipoly(&w), "x1^3 + x1^2");
    }

    #[test]
    fn no_cubic_counterexample_mod_three() {
        let f3 = PrimeField::new(3).unwrap();
        assert!(brute_force_counterexample(&f3, 3).is_none());
        let rep = verify_degree(&f3, 3).unwrap();
        assert!(rep.passed, "char-3 forces pure powers for d = 3");
    }

    #[test]
    fn empty_prime_range_is_empty_report() {
        let rep = scan_bad_primes(3, 1).unwrap();
        assert!(rep.primes_scanned.is_empty());
        assert!(rep.failing.is_empty());
    }

    #[test]
    fn sequences_regenerate_deterministically() {
        let a = build_s(&Rationals, 4, &[2, 3, 1]).unwrap();
        let b = build_s(&Rationals, 4, &[2, 3, 1]).unwrap();
        assert_eq!(a, b);
        let c = build_s_hat(&Rationals, 3, &[1, 4]).unwrap();
        let d = build_s_hat(&Rationals, 3, &[1, 4]).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn degree_bookkeeping() {
        for d in 3..=5usize {
            let tuple: Vec<usize> = (0..d - 1).map(|i| i % d + 1).collect();
            let s = build_s(&Rationals, d, &tuple).unwrap();
            let expected: Vec<u32> = (1..d).map(|i| (d - i) as u32).collect();
            assert_eq!(s.degrees(), expected);
        }
        for n in 2..=5usize {
            for tuple in reduced_tuples(n).into_iter().take(3) {
                let s = build_s_hat(&Rationals, n, &tuple).unwrap();
                let expected: Vec<u32> = (1..n).map(|i| (n + 1 - i) as u32).collect();
                assert_eq!(s.degrees(), expected);
            }
        }
    }
}
