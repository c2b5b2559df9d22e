//! Buchberger-based ideal computations.
//!
//! The reduced Groebner basis is the workhorse: normal forms decide ideal
//! membership, leading-term ideals give Hilbert series and Krull dimension
//! combinatorially, Hilbert series certify regular sequences, and an
//! elimination order computes colon ideals.
//!
//! Determinism: for a fixed generator list the whole pipeline is a pure
//! function. Pair selection follows the normal strategy (smallest lcm total
//! degree, ties by pair creation index) and the Gebauer-Moeller update prunes
//! useless pairs.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coeff::{binomial, Field};
use crate::poly::{Homogeneity, Monomial, MonomialOrder, MultiPoly, PolyError, Ring};

/// Errors from ideal-level computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    /// The operation requires homogeneous generators.
    NonHomogeneous,
    /// The operation requires homogeneous elements of positive degree.
    DegreeZeroElement,
    /// A regular-sequence test was asked for more elements than variables.
    TooManyElements { elements: usize, nvars: usize },
    /// Colon ideal by zero, or another zero input.
    ZeroInput(&'static str),
    /// The quotient ring is zero (the ideal is the unit ideal).
    UnitIdeal,
    Poly(PolyError),
}

impl std::fmt::Display for GroebnerError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroebnerError::NonHomogeneous => write!(f, "generators must be homogeneous"),
            GroebnerError::DegreeZeroElement => {
                write!(f, "sequence elements must have positive degree")
            }
            GroebnerError::TooManyElements { elements, nvars } => write!(
                f,
                "sequence of {elements} elements in {nvars} variables cannot be regular"
            ),
            GroebnerError::ZeroInput(op) => write!(f, "{op}: zero input not allowed"),
            GroebnerError::UnitIdeal => write!(f, "the ideal is the unit ideal"),
            GroebnerError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GroebnerError {}

impl From<PolyError> for GroebnerError {
    fn from(e: PolyError) -> Self {
        GroebnerError::Poly(e)
    }
}

/// A reduced Groebner basis: monic generators, pairwise non-divisible
/// leading terms, every generator fully reduced against the others, sorted
/// descending by leading monomial. Unique for a given ideal and order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis<F: Field> {
    ring: Ring<F>,
    generators: Vec<MultiPoly<F>>,
}

impl<F: Field> GroebnerBasis<F> {
    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn generators(&self) -> &[MultiPoly<F>] {
        &self.generators
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators
            .iter()
            .map(|g| g.leading_term().expect("basis elements are nonzero").0.clone())
            .collect()
    }

    pub fn contains_unit(&self) -> bool {
        self.generators
            .iter()
            .any(|g| g.leading_term().is_some_and(|(m, _)| m.is_unit()))
    }

    /// Monomials of total degree `d` outside the leading-term ideal, in
    /// descending monomial order. These form a basis of `(R/I)_d`.
    pub fn standard_monomials(&self, d: u32) -> Vec<Monomial> {
        let lts = self.leading_monomials();
        let mut out: Vec<Monomial> = monomials_of_degree(self.ring.nvars, d)
            .into_iter()
            .filter(|m| !lts.iter().any(|lt| lt.divides(m)))
            .collect();
        out.sort_by(|a, b| self.ring.order.cmp(b, a));
        out
    }
}

/// All monomials of total degree `d` in `nvars` variables (unsorted).
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn rec(nvars: usize, pos: usize, left: u32, exps: &mut [u32], out: &mut Vec<Monomial>) {
        if pos == nvars - 1 {
            exps[pos] = left;
            out.push(Monomial::new(exps.to_vec()));
            return;
        }
        for v in 0..=left {
            exps[pos] = v;
            rec(nvars, pos + 1, left - v, exps, out);
        }
        exps[pos] = 0;
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial::new(vec![]));
        }
        return out;
    }
    rec(nvars, 0, d, &mut exps, &mut out);
    out
}

/// Full normal form of `f` against an ordered list of nonzero reducers:
/// each reducible term is cancelled with the first reducer whose leading
/// term divides it.
fn reduce_full<F: Field>(f: &MultiPoly<F>, reducers: &[MultiPoly<F>]) -> MultiPoly<F> {
    let ring = f.ring().clone();
    let field = ring.field.clone();
    let mut work = f.clone();
    let mut tail = MultiPoly::zero(&ring);
    'outer: while let Some((lm, lc)) = work.leading_term() {
        let lm = lm.clone();
        let lc = lc.clone();
        for g in reducers {
            let (glm, glc) = g.leading_term().expect("reducers are nonzero");
            if let Some(q) = glm.div_into(&lm) {
                let c = field.div(&lc, glc).expect("leading coefficients are units");
                work = work.sub(&g.mul_term(&q, &c)).expect("same ring");
                continue 'outer;
            }
        }
        // leading term irreducible: move it to the remainder
        let head = MultiPoly::from_terms(&ring, vec![(lm, lc)]);
        tail = tail.add(&head).expect("same ring");
        work = work.sub(&head).expect("same ring");
    }
    tail
}

/// Normal form against a reduced basis: the unique remainder, zero iff `f`
/// lies in the ideal.
pub fn normal_form<F: Field>(f: &MultiPoly<F>, gb: &GroebnerBasis<F>) -> MultiPoly<F> {
    reduce_full(f, &gb.generators)
}

/// Normal form with recorded division quotients: returns `(r, q)` such that
/// `f = sum q_i g_i + r` exactly.
pub fn normal_form_with_quotients<F: Field>(
    f: &MultiPoly<F>,
    gb: &GroebnerBasis<F>,
) -> (MultiPoly<F>, Vec<MultiPoly<F>>) {
    let ring = f.ring().clone();
    let field = ring.field.clone();
    let mut work = f.clone();
    let mut tail = MultiPoly::zero(&ring);
    let mut quots = vec![MultiPoly::zero(&ring); gb.generators.len()];
    'outer: while let Some((lm, lc)) = work.leading_term() {
        let lm = lm.clone();
        let lc = lc.clone();
        for (i, g) in gb.generators.iter().enumerate() {
            let (glm, glc) = g.leading_term().expect("basis elements are nonzero");
            if let Some(q) = glm.div_into(&lm) {
                let c = field.div(&lc, glc).expect("leading coefficients are units");
                let qterm = MultiPoly::from_terms(&ring, vec![(q.clone(), c.clone())]);
                quots[i] = quots[i].add(&qterm).expect("same ring");
                work = work.sub(&g.mul_term(&q, &c)).expect("same ring");
                continue 'outer;
            }
        }
        let head = MultiPoly::from_terms(&ring, vec![(lm, lc)]);
        tail = tail.add(&head).expect("same ring");
        work = work.sub(&head).expect("same ring");
    }
    (tail, quots)
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    degree: u32,
    index: u64,
}

/// Computes the reduced Groebner basis of the ideal generated by `gens`.
///
/// Zero generators are dropped; over the rationals, inputs are first scaled
/// to integer content one. Pair handling follows the Gebauer-Moeller update,
/// selection is by lcm total degree with ties broken by pair creation index.
pub fn buchberger<F: Field>(gens: &[MultiPoly<F>]) -> Result<GroebnerBasis<F>, GroebnerError> {
    let ring = gens
        .iter()
        .map(|g| g.ring().clone())
        .next()
        .unwrap_or_else(|| panic!("buchberger needs at least one generator to fix the ring"));
    buchberger_in(&ring, gens)
}

/// As [`buchberger`] but with an explicit ring, allowing an empty generator
/// list (the zero ideal).
pub fn buchberger_in<F: Field>(
    ring: &Ring<F>,
    gens: &[MultiPoly<F>],
) -> Result<GroebnerBasis<F>, GroebnerError> {
    let field = ring.field.clone();
    let mut basis: Vec<MultiPoly<F>> = Vec::new();
    for g in gens {
        if g.ring() != ring {
            return Err(GroebnerError::Poly(PolyError::RingMismatch));
        }
        if g.is_zero() {
            continue;
        }
        basis.push(content_scaled(g).monic());
    }

    let mut pairs: Vec<Pair> = Vec::new();
    let mut next_index = 0u64;
    let mut active: Vec<MultiPoly<F>> = Vec::new();
    for g in basis {
        gm_update(ring, &mut active, &mut pairs, g, &mut next_index);
    }

    while !pairs.is_empty() {
        // normal strategy: smallest lcm degree, ties by creation index
        let best = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (p.degree, p.index))
            .map(|(k, _)| k)
            .unwrap();
        let pair = pairs.swap_remove(best);
        let spoly = s_polynomial(&field, &active[pair.i], &active[pair.j], &pair.lcm);
        let nf = reduce_full(&spoly, &active);
        if !nf.is_zero() {
            gm_update(ring, &mut active, &mut pairs, nf.monic(), &mut next_index);
        }
    }

    // minimalize: drop elements whose leading term another leading term divides
    let mut keep = vec![true; active.len()];
    for i in 0..active.len() {
        if !keep[i] {
            continue;
        }
        let (lmi, _) = active[i].leading_term().unwrap();
        for j in 0..active.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (lmj, _) = active[j].leading_term().unwrap();
            if lmj.divides(lmi) && (!lmi.divides(lmj) || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<MultiPoly<F>> = active
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| k.then_some(g))
        .collect();

    // inter-reduce to the unique reduced basis
    let mut reduced: Vec<MultiPoly<F>> = minimal;
    loop {
        let mut changed = false;
        for i in 0..reduced.len() {
            let others: Vec<MultiPoly<F>> = reduced
                .iter()
                .enumerate()
                .filter(|&(j, _g)| j != i).map(|(_j, g)| g.clone())
                .collect();
            let nf = reduce_full(&reduced[i], &others).monic();
            if nf != reduced[i] {
                changed = true;
                reduced[i] = nf;
            }
        }
        reduced.retain(|g| !g.is_zero());
        if !changed {
            break;
        }
    }
    reduced.sort_by(|a, b| {
        let (ma, _) = a.leading_term().unwrap();
        let (mb, _) = b.leading_term().unwrap();
        ring.order.cmp(mb, ma)
    });
    Ok(GroebnerBasis {
        ring: ring.clone(),
        generators: reduced,
    })
}

fn content_scaled<F: Field>(g: &MultiPoly<F>) -> MultiPoly<F> {
    let ring = g.ring().clone();
    let mut coeffs: Vec<F::Elem> = g.terms().iter().map(|(_, c)| c.clone()).collect();
    ring.field.normalize_row(&mut coeffs);
    let terms = g
        .terms()
        .iter()
        .zip(coeffs)
        .map(|((m, _), c)| (m.clone(), c))
        .collect();
    MultiPoly::from_terms(&ring, terms)
}

fn s_polynomial<F: Field>(
    field: &F,
    f: &MultiPoly<F>,
    g: &MultiPoly<F>,
    lcm: &Monomial,
) -> MultiPoly<F> {
    let (fm, fc) = f.leading_term().unwrap();
    let (gm, gc) = g.leading_term().unwrap();
    let fq = fm.div_into(lcm).unwrap();
    let gq = gm.div_into(lcm).unwrap();
    let finv = field.inv(fc).unwrap();
    let ginv = field.inv(gc).unwrap();
    f.mul_term(&fq, &finv)
        .sub(&g.mul_term(&gq, &ginv))
        .expect("same ring")
}

/// Gebauer-Moeller update: adds `t` to the basis, creating only the pairs
/// that survive the product and chain criteria and pruning old pairs made
/// redundant by `t`.
fn gm_update<F: Field>(
    ring: &Ring<F>,
    basis: &mut Vec<MultiPoly<F>>,
    pairs: &mut Vec<Pair>,
    t: MultiPoly<F>,
    next_index: &mut u64,
) {
    let t_idx = basis.len();
    let (tm, _) = t.leading_term().expect("nonzero");
    let tm = tm.clone();

    let candidates: Vec<Pair> = (0..t_idx)
        .map(|i| {
            let (im, _) = basis[i].leading_term().unwrap();
            let lcm = im.lcm(&tm);
            Pair {
                i,
                j: t_idx,
                degree: lcm.total_degree(),
                lcm,
                index: 0,
            }
        })
        .collect();

    // chain criterion among the new pairs: drop (i,t) when another new pair
    // (j,t) has lcm properly dividing lcm(i,t), or equal with smaller index
    let mut keep_new = vec![true; candidates.len()];
    for a in 0..candidates.len() {
        if !keep_new[a] {
            continue;
        }
        for b in 0..candidates.len() {
            if a == b || !keep_new[b] {
                continue;
            }
            let la = &candidates[a].lcm;
            let lb = &candidates[b].lcm;
            if lb.divides(la) && (lb != la || b < a) {
                keep_new[a] = false;
                break;
            }
        }
    }
    // product criterion: coprime leading terms reduce to zero
    for (k, p) in candidates.iter().enumerate() {
        if !keep_new[k] {
            continue;
        }
        let (im, _) = basis[p.i].leading_term().unwrap();
        let coprime = im
            .exps()
            .iter()
            .zip(tm.exps())
            .all(|(a, b)| *a == 0 || *b == 0);
        if coprime {
            keep_new[k] = false;
        }
    }

    // prune old pairs whose lcm the new leading term strictly refines
    pairs.retain(|p| {
        let (im, _) = basis[p.i].leading_term().unwrap();
        let (jm, _) = basis[p.j].leading_term().unwrap();
        !(tm.divides(&p.lcm) && im.lcm(&tm) != p.lcm && jm.lcm(&tm) != p.lcm)
    });

    for (k, mut p) in candidates.into_iter().enumerate() {
        if keep_new[k] {
            p.index = *next_index;
            *next_index += 1;
            pairs.push(p);
        }
    }
    let _ = ring;
    basis.push(t);
}

/// Hilbert series of a graded quotient `R/I`, stored as the integer
/// numerator polynomial over the implicit denominator `(1-t)^nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSeries {
    numerator: Vec<BigInt>,
    nvars: usize,
}

impl HilbertSeries {
    pub fn numerator(&self) -> &[BigInt] {
        &self.numerator
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Hilbert function values `dim_K (R/I)_m` for `m = 0..=up_to`.
    pub fn coefficients(&self, up_to: u32) -> Vec<BigInt> {
        let n = self.nvars as u64;
        (0..=up_to)
            .map(|m| {
                let mut acc = BigInt::zero();
                for (j, c) in self.numerator.iter().enumerate() {
                    if (j as u32) > m || c.is_zero() {
                        continue;
                    }
                    let k = (m - j as u32) as u64;
                    // dim of degree-k piece of K[x_1..x_n]
                    acc += c * binomial(n - 1 + k, n - 1);
                }
                acc
            })
            .collect()
    }

    /// Total dimension of `R/I` over the field when finite.
    pub fn total_dimension(&self) -> Option<BigInt> {
        let top = self.numerator.len() as u32;
        let values = self.coefficients(top + 1);
        if let Some(last) = values.last() {
            if !last.is_zero() {
                return None;
            }
        }
        Some(values.iter().sum())
    }
}

/// Numerator of the Hilbert series of `R/I` for a monomial ideal given by
/// generators, via the standard colon-splitting recursion.
fn hilbert_numerator_monomial(gens: &[Monomial]) -> Vec<BigInt> {
    let gens = minimalize_monomials(gens);
    if gens.iter().any(|g| g.is_unit()) {
        return vec![BigInt::zero()];
    }
    if gens.is_empty() {
        return vec![BigInt::one()];
    }
    // base case: pairwise coprime generators form a monomial complete
    // intersection with numerator prod (1 - t^{deg})
    let coprime = gens.iter().enumerate().all(|(i, a)| {
        gens.iter().skip(i + 1).all(|b| {
            a.exps()
                .iter()
                .zip(b.exps())
                .all(|(x, y)| *x == 0 || *y == 0)
        })
    });
    if coprime {
        let mut acc = vec![BigInt::one()];
        for g in &gens {
            let mut factor = vec![BigInt::zero(); g.total_degree() as usize + 1];
            factor[0] = BigInt::one();
            *factor.last_mut().unwrap() = -BigInt::one();
            acc = poly_mul_int(&acc, &factor);
        }
        return acc;
    }
    // split off the generator of largest degree (ties: last in list)
    let split = gens
        .iter()
        .enumerate()
        .max_by_key(|(i, g)| (g.total_degree(), *i))
        .map(|(i, _)| i)
        .unwrap();
    let m = gens[split].clone();
    let rest: Vec<Monomial> = gens
        .iter()
        .enumerate()
        .filter(|&(i, _g)| i != split).map(|(_i, g)| g.clone())
        .collect();
    // N(I) = N(J) - t^{|m|} N(J : m)
    let n_j = hilbert_numerator_monomial(&rest);
    let colon: Vec<Monomial> = rest
        .iter()
        .map(|g| {
            // g / gcd(g, m)
            let exps = g
                .exps()
                .iter()
                .zip(m.exps())
                .map(|(a, b)| a.saturating_sub(*b))
                .collect();
            Monomial::new(exps)
        })
        .collect();
    let n_colon = hilbert_numerator_monomial(&colon);
    let mut shifted = vec![BigInt::zero(); m.total_degree() as usize];
    shifted.extend(n_colon);
    poly_sub_int(&n_j, &shifted)
}

fn minimalize_monomials(gens: &[Monomial]) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = Vec::new();
    let mut sorted: Vec<&Monomial> = gens.iter().collect();
    sorted.sort_by_key(|m| m.total_degree());
    for g in sorted {
        if !out.iter().any(|h| h.divides(g)) {
            out.push(g.clone());
        }
    }
    out
}

fn poly_mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_int(out)
}

fn poly_sub_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let get = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_else(BigInt::zero);
    trim_int((0..n).map(|i| get(a, i) - get(b, i)).collect())
}

fn trim_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Hilbert series of `R/I` from the leading-term ideal of a homogeneous
/// Groebner basis.
pub fn hilbert_series<F: Field>(gb: &GroebnerBasis<F>) -> Result<HilbertSeries, GroebnerError> {
    for g in &gb.generators {
        if !g.homogeneity().is_homogeneous() {
            return Err(GroebnerError::NonHomogeneous);
        }
    }
    Ok(HilbertSeries {
        numerator: hilbert_numerator_monomial(&gb.leading_monomials()),
        nvars: gb.ring.nvars,
    })
}

/// Krull dimension of `R/I` for homogeneous `I`: the maximum size of a
/// variable subset containing no leading-term support.
pub fn krull_dimension<F: Field>(gb: &GroebnerBasis<F>) -> Result<usize, GroebnerError> {
    for g in &gb.generators {
        if !g.homogeneity().is_homogeneous() {
            return Err(GroebnerError::NonHomogeneous);
        }
    }
    if gb.contains_unit() {
        return Err(GroebnerError::UnitIdeal);
    }
    let n = gb.ring.nvars;
    let supports: Vec<u64> = gb
        .leading_monomials()
        .iter()
        .map(|m| {
            m.exps()
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &e)| if e > 0 { acc | 1 << i } else { acc })
        })
        .collect();
    let mut best = 0usize;
    for subset in 0u64..(1 << n) {
        if supports.iter().any(|s| s & !subset == 0) {
            continue; // some leading term lives inside the subset
        }
        best = best.max(subset.count_ones() as usize);
    }
    Ok(best)
}

/// Outcome of a regular-sequence test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityVerdict {
    pub regular: bool,
    /// Degrees of the sequence elements, in order.
    pub degrees: Vec<u32>,
    /// First graded degree where the Hilbert function diverges from the
    /// complete-intersection prediction, when not regular.
    pub witness_degree: Option<u32>,
}

/// Decides whether homogeneous positive-degree elements form a regular
/// sequence, by comparing the Hilbert series of the ideal with the
/// complete-intersection series `prod (1 - t^{d_i}) / (1-t)^n`.
///
/// For homogeneous elements of positive degree in a polynomial ring this
/// criterion is exact, and independent of the element order and of field
/// extensions.
pub fn is_regular_sequence<F: Field>(
    seq: &[MultiPoly<F>],
) -> Result<RegularityVerdict, GroebnerError> {
    if seq.is_empty() {
        return Ok(RegularityVerdict {
            regular: true,
            degrees: vec![],
            witness_degree: None,
        });
    }
    let ring = seq[0].ring().clone();
    let mut degrees = Vec::with_capacity(seq.len());
    for f in seq {
        if f.ring() != &ring {
            return Err(GroebnerError::Poly(PolyError::RingMismatch));
        }
        match f.homogeneity() {
            Homogeneity::Homogeneous(d) if d > 0 => degrees.push(d),
            Homogeneity::Homogeneous(_) | Homogeneity::Zero => {
                return Err(GroebnerError::DegreeZeroElement)
            }
            Homogeneity::Inhomogeneous => return Err(GroebnerError::NonHomogeneous),
        }
    }
    if seq.len() > ring.nvars {
        return Err(GroebnerError::TooManyElements {
            elements: seq.len(),
            nvars: ring.nvars,
        });
    }
    let gb = buchberger(seq)?;
    let actual = hilbert_series(&gb)?;
    let mut expected = vec![BigInt::one()];
    for d in &degrees {
        let mut factor = vec![BigInt::zero(); *d as usize + 1];
        factor[0] = BigInt::one();
        *factor.last_mut().unwrap() = -BigInt::one();
        expected = poly_mul_int(&expected, &factor);
    }
    let diff = poly_sub_int(actual.numerator(), &expected);
    if diff.is_empty() {
        return Ok(RegularityVerdict {
            regular: true,
            degrees,
            witness_degree: None,
        });
    }
    let witness = diff
        .iter()
        .position(|c| !c.is_zero())
        .expect("difference is nonzero") as u32;
    Ok(RegularityVerdict {
        regular: false,
        degrees,
        witness_degree: Some(witness),
    })
}

/// Groebner basis of the colon ideal `(I : g)` via the elimination method:
/// `(I : g) = (1/g) · (I ∩ (g))` and `I ∩ (g)` comes from eliminating `t`
/// from `t·I + (1-t)·(g)`.
pub fn colon_ideal<F: Field>(
    gb: &GroebnerBasis<F>,
    g: &MultiPoly<F>,
) -> Result<GroebnerBasis<F>, GroebnerError> {
    if g.is_zero() {
        return Err(GroebnerError::ZeroInput("colon_ideal"));
    }
    if g.ring() != &gb.ring {
        return Err(GroebnerError::Poly(PolyError::RingMismatch));
    }
    let ring = gb.ring.clone();
    let ext = Ring::with_order(ring.nvars + 1, ring.field.clone(), MonomialOrder::ElimFirst);

    let lift = |f: &MultiPoly<F>, t_exp: u32| -> MultiPoly<F> {
        let terms = f
            .terms()
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![t_exp];
                exps.extend_from_slice(m.exps());
                (Monomial::new(exps), c.clone())
            })
            .collect();
        MultiPoly::from_terms(&ext, terms)
    };

    let mut ext_gens: Vec<MultiPoly<F>> = gb.generators.iter().map(|f| lift(f, 1)).collect();
    // (1 - t) * g
    let one_minus_t_g = lift(g, 0).sub(&lift(g, 1)).expect("same ring");
    ext_gens.push(one_minus_t_g);
    let ext_gb = buchberger_in(&ext, &ext_gens)?;

    let mut intersection: Vec<MultiPoly<F>> = Vec::new();
    for h in ext_gb.generators() {
        if h.terms().iter().all(|(m, _)| m.exps()[0] == 0) {
            let terms = h
                .terms()
                .iter()
                .map(|(m, c)| (Monomial::new(m.exps()[1..].to_vec()), c.clone()))
                .collect();
            intersection.push(MultiPoly::from_terms(&ring, terms));
        }
    }
    let quotients = intersection
        .iter()
        .map(|h| divide_exact(h, g))
        .collect::<Result<Vec<_>, _>>()?;
    buchberger_in(&ring, &quotients)
}

/// Exact division `h / g`, erroring if `g` does not divide `h`.
pub fn divide_exact<F: Field>(
    h: &MultiPoly<F>,
    g: &MultiPoly<F>,
) -> Result<MultiPoly<F>, GroebnerError> {
    if g.is_zero() {
        return Err(GroebnerError::ZeroInput("divide_exact"));
    }
    let ring = h.ring().clone();
    let field = ring.field.clone();
    let mut rem = h.clone();
    let mut quo = MultiPoly::zero(&ring);
    let (gm, gc) = g.leading_term().unwrap();
    let gm = gm.clone();
    let gc = gc.clone();
    while let Some((rm, rc)) = rem.leading_term() {
        let q = gm
            .div_into(rm)
            .ok_or(GroebnerError::ZeroInput("divide_exact: not divisible"))?;
        let c = field.div(rc, &gc).expect("nonzero leading coefficient");
        let qterm = MultiPoly::from_terms(&ring, vec![(q, c)]);
        quo = quo.add(&qterm).expect("same ring");
        rem = rem.sub(&g.mul(&qterm).expect("same ring")).expect("same ring");
    }
    Ok(quo)
}

/// Caches Groebner bases keyed by rendered generators; several verification
/// passes revisit the same ideals.
#[derive(Default)]
pub struct GbCache<F: Field> {
    map: HashMap<Vec<String>, GroebnerBasis<F>>,
}

impl<F: Field> GbCache<F> {
    pub fn new() -> Self {
        GbCache { map: HashMap::new() }
    }

    pub fn get(
        &mut self,
        ring: &Ring<F>,
        gens: &[MultiPoly<F>],
    ) -> Result<GroebnerBasis<F>, GroebnerError> {
        let key: Vec<String> = gens.iter().map(|g| g.render()).collect();
        if let Some(gb) = self.map.get(&key) {
            return Ok(gb.clone());
        }
        let gb = buchberger_in(ring, gens)?;
        self.map.insert(key, gb.clone());
        Ok(gb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{PrimeField, Rationals};

    fn qring(n: usize) -> Ring<Rationals> {
        Ring::new(n, Rationals)
    }

    fn qp(ring: &Ring<Rationals>, s: &str) -> MultiPoly<Rationals> {
        MultiPoly::parse(ring, s).unwrap()
    }

    #[test]
    fn variables_are_already_a_basis() {
        let r = qring(2);
        let gb = buchberger(&[qp(&r, "x1"), qp(&r, "x2")]).unwrap();
        assert_eq!(gb.generators(), &[qp(&r, "x1"), qp(&r, "x2")]);
    }

    #[test]
    fn substitution_example_leading_terms() {
        // {x1^2 - x1 x2, x1 - 2 x2} has reduced basis with LTs {x1, x2^2}
        let r = qring(2);
        let gb = buchberger(&[qp(&r, "x1^2 - x1*x2"), qp(&r, "x1 - 2*x2")]).unwrap();
        let lts = gb.leading_monomials();
        assert_eq!(lts.len(), 2);
        assert!(lts.contains(&Monomial::new(vec![1, 0])));
        assert!(lts.contains(&Monomial::new(vec![0, 2])));
        // membership by construction
        assert!(normal_form(&qp(&r, "x1^2"), &gb).is_zero());
    }

    #[test]
    fn duplicate_generators_collapse() {
        let r = qring(2);
        let f = qp(&r, "x1^2 + x2^2");
        let gb = buchberger(&[f.clone(), f.clone()]).unwrap();
        assert_eq!(gb.generators().len(), 1);
    }

    #[test]
    fn buchberger_is_idempotent() {
        let r = qring(3);
        let gens = [
            qp(&r, "x1*x2 - x3^2"),
            qp(&r, "x2^2 + x1*x3"),
            qp(&r, "x1^2*x3 - x2*x3^2"),
        ];
        let gb = buchberger(&gens).unwrap();
        let gb2 = buchberger(gb.generators()).unwrap();
        assert_eq!(gb, gb2);
    }

    #[test]
    fn normal_form_basics() {
        let r = qring(3);
        let g = qp(&r, "x1^2 - x2*x3");
        let gb = buchberger(std::slice::from_ref(&g)).unwrap();
        assert!(normal_form(&g, &gb).is_zero());
        let maximal = buchberger(&[qp(&r, "x1"), qp(&r, "x2"), qp(&r, "x3")]).unwrap();
        assert_eq!(normal_form(&qp(&r, "1"), &maximal), qp(&r, "1"));
    }

    #[test]
    fn division_quotients_reassemble() {
        let r = qring(2);
        let gens = [qp(&r, "x1^2 - x1*x2"), qp(&r, "x1 - 2*x2")];
        let gb = buchberger(&gens).unwrap();
        let f = qp(&r, "x1^3 + x2^3 - x1*x2 + 5");
        let (rem, quots) = normal_form_with_quotients(&f, &gb);
        let mut acc = rem;
        for (q, g) in quots.iter().zip(gb.generators()) {
            acc = acc.add(&q.mul(g).unwrap()).unwrap();
        }
        assert_eq!(acc, f);
    }

    #[test]
    fn hilbert_series_of_zero_ideal() {
        let r = qring(3);
        let gb = buchberger_in(&r, &[]).unwrap();
        let hs = hilbert_series(&gb).unwrap();
        assert_eq!(hs.numerator(), &[BigInt::one()]);
        let hf = hs.coefficients(3);
        assert_eq!(hf, vec![1.into(), 3.into(), 6.into(), 10.into()]);
    }

    #[test]
    fn hilbert_series_of_complete_intersection() {
        // degrees 2 and 3 in three variables
        let r = qring(3);
        let gb = buchberger(&[qp(&r, "x1^2 + x2*x3"), qp(&r, "x2^3 - x3^3")]).unwrap();
        let hs = hilbert_series(&gb).unwrap();
        let expected = poly_mul_int(
            &[BigInt::one(), BigInt::zero(), -BigInt::one()],
            &[BigInt::one(), BigInt::zero(), BigInt::zero(), -BigInt::one()],
        );
        assert_eq!(hs.numerator(), &expected[..]);
        // cross-check degreewise against direct standard-monomial counting
        for d in 0..=6u32 {
            let count = gb.standard_monomials(d).len();
            assert_eq!(BigInt::from(count), hs.coefficients(d)[d as usize]);
        }
    }

    #[test]
    fn hilbert_rejects_inhomogeneous() {
        let r = qring(2);
        let gb = buchberger(&[qp(&r, "x1 + 1")]).unwrap();
        assert_eq!(hilbert_series(&gb).unwrap_err(), GroebnerError::NonHomogeneous);
    }

    #[test]
    fn krull_dimensions() {
        let r = qring(3);
        let maximal = buchberger(&[qp(&r, "x1"), qp(&r, "x2"), qp(&r, "x3")]).unwrap();
        assert_eq!(krull_dimension(&maximal).unwrap(), 0);
        let r2 = qring(2);
        let line = buchberger(&[qp(&r2, "x1")]).unwrap();
        assert_eq!(krull_dimension(&line).unwrap(), 1);
        let zero = buchberger_in(&r2, &[]).unwrap();
        assert_eq!(krull_dimension(&zero).unwrap(), 2);
    }

    #[test]
    fn regular_sequence_examples() {
        let r = qring(3);
        let vars = [qp(&r, "x1"), qp(&r, "x2"), qp(&r, "x3")];
        assert!(is_regular_sequence(&vars).unwrap().regular);

        let r2 = qring(2);
        let bad = [qp(&r2, "x1"), qp(&r2, "x1*x2")];
        let v = is_regular_sequence(&bad).unwrap();
        assert!(!v.regular);
        assert_eq!(v.witness_degree, Some(2));

        let s212 = [qp(&r2, "x1^2 - x1*x2"), qp(&r2, "x1 - 2*x2")];
        assert!(is_regular_sequence(&s212).unwrap().regular);
    }

    #[test]
    fn regularity_rejects_bad_inputs() {
        let r = qring(2);
        assert_eq!(
            is_regular_sequence(&[qp(&r, "x1 + 1")]).unwrap_err(),
            GroebnerError::NonHomogeneous
        );
        assert_eq!(
            is_regular_sequence(&[qp(&r, "3")]).unwrap_err(),
            GroebnerError::DegreeZeroElement
        );
        let three = [qp(&r, "x1"), qp(&r, "x2"), qp(&r, "x1 + x2")];
        assert!(matches!(
            is_regular_sequence(&three).unwrap_err(),
            GroebnerError::TooManyElements { .. }
        ));
    }

    #[test]
    fn colon_ideal_examples() {
        let r = qring(2);
        // (x1^2) : x1 = (x1)
        let sq = buchberger(&[qp(&r, "x1^2")]).unwrap();
        let col = colon_ideal(&sq, &qp(&r, "x1")).unwrap();
        assert_eq!(col.generators(), &[qp(&r, "x1")]);
        // (x1) : x2 = (x1)
        let lin = buchberger(&[qp(&r, "x1")]).unwrap();
        let col2 = colon_ideal(&lin, &qp(&r, "x2")).unwrap();
        assert_eq!(col2.generators(), &[qp(&r, "x1")]);
        // zero divisor: ((x1*x2) : x1) = (x2)
        let prod = buchberger(&[qp(&r, "x1*x2")]).unwrap();
        let col3 = colon_ideal(&prod, &qp(&r, "x1")).unwrap();
        assert_eq!(col3.generators(), &[qp(&r, "x2")]);
        assert!(colon_ideal(&lin, &MultiPoly::zero(&r)).is_err());
    }

    #[test]
    fn divide_exact_roundtrip() {
        let r = qring(2);
        let g = qp(&r, "x1 - 2*x2");
        let h = qp(&r, "x1^2 - 4*x2^2");
        assert_eq!(divide_exact(&h, &g).unwrap(), qp(&r, "x1 + 2*x2"));
        assert!(divide_exact(&qp(&r, "x1^2 + 1"), &g).is_err());
    }

    #[test]
    fn prime_field_groebner() {
        let f5 = Ring::new(2, PrimeField::new(5).unwrap());
        let a = MultiPoly::parse(&f5, "x1^2 + 2*x2^2").unwrap();
        let b = MultiPoly::parse(&f5, "x1*x2").unwrap();
        let gb = buchberger(&[a.clone(), b.clone()]).unwrap();
        assert!(normal_form(&a, &gb).is_zero());
        assert!(normal_form(&b.mul(&b).unwrap(), &gb).is_zero());
    }

    #[test]
    fn regularity_is_permutation_stable() {
        let r = qring(3);
        let seq = [
            qp(&r, "x1^2 + x2*x3"),
            qp(&r, "x2^2 - x1*x3"),
            qp(&r, "x3^2"),
        ];
        let base = is_regular_sequence(&seq).unwrap().regular;
        let perms: [[usize; 3]; 5] = [
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for p in perms {
            let permuted: Vec<_> = p.iter().map(|&i| seq[i].clone()).collect();
            assert_eq!(is_regular_sequence(&permuted).unwrap().regular, base);
        }
    }
}
