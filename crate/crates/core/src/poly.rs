//! Sparse multivariate and dense univariate polynomial arithmetic over an
//! exact coefficient field.
//!
//! Representation: a [`MultiPoly`] is a list of `(Monomial, coefficient)`
//! terms sorted descending in the ring's monomial order, with no zero
//! coefficients stored. Monomials are fixed-length exponent vectors. The
//! default order is graded reverse lexicographic; an elimination order on the
//! first variable exists for colon-ideal computations.
//!
//! The module also houses the operators specific to this project: univariate
//! and multivariate Hasse-Schmidt derivatives, elementary symmetric
//! polynomials, the automorphisms `Φ#_{d,j}` and variable swaps, coefficient
//! extraction with respect to the last variable, and univariate gcd /
//! Sylvester resultants.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::coeff::{binomial, Field, FieldDescriptor, FieldError, Rationals};

/// Errors from polynomial construction, arithmetic and parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// Operands live in different rings.
    RingMismatch,
    /// Text input violated the polynomial grammar; position is a byte offset.
    Parse { position: usize, message: String },
    /// An index argument (variable, automorphism or sequence index) is out of
    /// its documented range.
    BadIndex(String),
    /// The operation requires a nonzero (or not-all-zero) input.
    ZeroInput(&'static str),
    /// The operation requires a monic polynomial.
    NotMonic,
    Field(FieldError),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::RingMismatch => write!(f, "operands belong to different rings"),
            PolyError::Parse { position, message } => {
                write!(f, "parse error at byte {position}: {message}")
            }
            PolyError::BadIndex(m) => write!(f, "index out of range: {m}"),
            PolyError::ZeroInput(op) => write!(f, "{op}: zero input not allowed"),
            PolyError::NotMonic => write!(f, "polynomial must be monic"),
            PolyError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PolyError {}

impl From<FieldError> for PolyError {
    fn from(e: FieldError) -> Self {
        PolyError::Field(e)
    }
}

/// A monomial: exponent vector of fixed length equal to the ring's variable
/// count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn unit(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[idx] = 1;
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, defined only when `self` divides `other`.
    pub fn div_into(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial {
            exps: other
                .exps
                .iter()
                .zip(&self.exps)
                .map(|(b, a)| b - a)
                .collect(),
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Exponent of the last variable.
    pub fn last_exp(&self) -> u32 {
        *self.exps.last().expect("ring has at least one variable")
    }
}

/// Monomial orders available on a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic: higher total degree first; ties broken
    /// by the last nonzero entry of the exponent difference being negative.
    GrevLex,
    /// Eliminate the first variable: compare its exponent first, then
    /// grevlex on the full vector. Any monomial containing the first
    /// variable exceeds every monomial free of it.
    ElimFirst,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::GrevLex => grevlex_cmp(&a.exps, &b.exps),
            MonomialOrder::ElimFirst => a.exps[0]
                .cmp(&b.exps[0])
                .then_with(|| grevlex_cmp(&a.exps, &b.exps)),
        }
    }
}

fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for (x, y) in a.iter().zip(b).rev() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            // last nonzero difference negative means a is larger
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

/// A polynomial ring descriptor: variable count, coefficient field and term
/// order. Variables are `x1..xn` with `x_n` always last; the embedding
/// `R_{n-1} ⊂ R_n` is "same exponents, last exponent zero".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring<F: Field> {
    pub nvars: usize,
    pub field: F,
    pub order: MonomialOrder,
}

impl<F: Field> Ring<F> {
    pub fn new(nvars: usize, field: F) -> Self {
        Ring {
            nvars,
            field,
            order: MonomialOrder::GrevLex,
        }
    }

    pub fn with_order(nvars: usize, field: F, order: MonomialOrder) -> Self {
        Ring { nvars, field, order }
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        self.field.descriptor()
    }
}

/// A sparse multivariate polynomial. Terms are sorted descending in the
/// ring's monomial order and never carry zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly<F: Field> {
    ring: Ring<F>,
    terms: Vec<(Monomial, F::Elem)>,
}

/// Homogeneity report: the zero polynomial counts as homogeneous of degree
/// "minus infinity".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Homogeneous(u32),
    Inhomogeneous,
}

impl Homogeneity {
    pub fn is_homogeneous(&self) -> bool {
        !matches!(self, Homogeneity::Inhomogeneous)
    }
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(ring: &Ring<F>) -> Self {
        MultiPoly {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &Ring<F>) -> Self {
        Self::constant(ring, ring.field.one())
    }

    pub fn constant(ring: &Ring<F>, c: F::Elem) -> Self {
        if ring.field.is_zero(&c) {
            return Self::zero(ring);
        }
        MultiPoly {
            ring: ring.clone(),
            terms: vec![(Monomial::unit(ring.nvars), c)],
        }
    }

    /// The variable `x_{idx+1}` (zero-based index).
    pub fn variable(ring: &Ring<F>, idx: usize) -> Self {
        assert!(idx < ring.nvars);
        MultiPoly {
            ring: ring.clone(),
            terms: vec![(Monomial::var(ring.nvars, idx), ring.field.one())],
        }
    }

    /// Builds from raw terms: merges duplicates, drops zeros, sorts.
    pub fn from_terms(ring: &Ring<F>, raw: Vec<(Monomial, F::Elem)>) -> Self {
        let mut map: HashMap<Monomial, F::Elem> = HashMap::with_capacity(raw.len());
        for (m, c) in raw {
            assert_eq!(m.nvars(), ring.nvars, "monomial length matches ring");
            match map.entry(m) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    let s = ring.field.add(e.get(), &c);
                    if ring.field.is_zero(&s) {
                        e.remove();
                    } else {
                        e.insert(s);
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    if !ring.field.is_zero(&c) {
                        e.insert(c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = map.into_iter().collect();
        terms.sort_by(|(a, _), (b, _)| ring.order.cmp(b, a));
        MultiPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        &self.ring.field
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &F::Elem)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        self.terms
            .iter()
            .find(|(mm, _)| mm == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.ring.field.zero())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.total_degree()).max()
    }

    fn check_ring(&self, other: &Self) -> Result<(), PolyError> {
        if self.ring != other.ring {
            return Err(PolyError::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let field = &self.ring.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match self.ring.order.cmp(ma, mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate_other { field.neg(cb) } else { cb.clone() };
                    out.push((mb.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other {
                        field.sub(ca, cb)
                    } else {
                        field.add(ca, cb)
                    };
                    if !field.is_zero(&c) {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        for (m, c) in &other.terms[j..] {
            let c = if negate_other { field.neg(c) } else { c.clone() };
            out.push((m.clone(), c));
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn neg(&self) -> Self {
        let field = &self.ring.field;
        MultiPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), field.neg(c)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let field = &self.ring.field;
        if field.is_zero(c) {
            return Self::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), field.mul(a, c)))
                .collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &F::Elem) -> Self {
        let field = &self.ring.field;
        if field.is_zero(c) {
            return Self::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mm, a)| (mm.mul(m), field.mul(a, c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let field = &self.ring.field;
        let mut map: HashMap<Monomial, F::Elem> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = field.mul(ca, cb);
                match map.entry(m) {
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        let s = field.add(e.get(), &c);
                        if field.is_zero(&s) {
                            e.remove();
                        } else {
                            e.insert(s);
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        if !field.is_zero(&c) {
                            e.insert(c);
                        }
                    }
                }
            }
        }
        let mut terms: Vec<_> = map.into_iter().collect();
        terms.sort_by(|(a, _), (b, _)| self.ring.order.cmp(b, a));
        Ok(MultiPoly {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut degs = self.terms.iter().map(|(m, _)| m.total_degree());
        match degs.next() {
            None => Homogeneity::Zero,
            Some(d) => {
                if degs.all(|e| e == d) {
                    Homogeneity::Homogeneous(d)
                } else {
                    Homogeneity::Inhomogeneous
                }
            }
        }
    }

    /// Degree in the last variable `x_n`; `None` for the zero polynomial.
    pub fn xn_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.last_exp()).max()
    }

    /// `λ_{n,k}`: the coefficient of `x_n^k`, as an element of `R_{n-1}`
    /// embedded in `R_n` (last exponent zero).
    pub fn coeff_of_xn_pow(&self, k: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.last_exp() == k)
            .map(|(m, c)| {
                let mut exps = m.exps().to_vec();
                let n = exps.len();
                exps[n - 1] = 0;
                (Monomial::new(exps), c.clone())
            })
            .collect();
        Self::from_terms(&self.ring, terms)
    }

    /// `λ_n`: the leading coefficient with respect to `x_n` (not a ring
    /// homomorphism). Zero input gives zero.
    pub fn leading_coeff_in_last_var(&self) -> Self {
        match self.xn_degree() {
            None => Self::zero(&self.ring),
            Some(d) => self.coeff_of_xn_pow(d),
        }
    }

    /// Reinterprets the polynomial in a ring with more variables (appending
    /// zero exponents). Field and order must match.
    pub fn extend_to(&self, bigger: &Ring<F>) -> Result<Self, PolyError> {
        if bigger.field != self.ring.field
            || bigger.order != self.ring.order
            || bigger.nvars < self.ring.nvars
        {
            return Err(PolyError::RingMismatch);
        }
        let pad = bigger.nvars - self.ring.nvars;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = m.exps().to_vec();
                exps.extend(std::iter::repeat_n(0, pad));
                (Monomial::new(exps), c.clone())
            })
            .collect();
        Ok(Self::from_terms(bigger, terms))
    }

    /// Inverse of [`MultiPoly::extend_to`]: drops trailing variables, which
    /// must not occur in any term.
    pub fn restrict_to(&self, smaller: &Ring<F>) -> Result<Self, PolyError> {
        if smaller.field != self.ring.field
            || smaller.order != self.ring.order
            || smaller.nvars > self.ring.nvars
        {
            return Err(PolyError::RingMismatch);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.exps()[smaller.nvars..].iter().any(|&e| e != 0) {
                    return Err(PolyError::RingMismatch);
                }
                Ok((Monomial::new(m.exps()[..smaller.nvars].to_vec()), c.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_terms(smaller, terms))
    }

    /// Scales so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lt_inv = self
            .ring
            .field
            .inv(&self.terms[0].1)
            .expect("leading coefficient nonzero");
        self.scale(&lt_inv)
    }
}

impl MultiPoly<Rationals> {
    /// Clears denominators and divides by the integer content; the result
    /// has coprime integer coefficients with positive leading coefficient.
    pub fn integer_primitive(&self) -> Self {
        use num_integer::Integer;
        use num_traits::{One, Zero};
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        for (_, c) in &self.terms {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        let scaled: Vec<BigInt> = self
            .terms
            .iter()
            .map(|(_, c)| c.numer() * (&den_lcm / c.denom()))
            .collect();
        for v in &scaled {
            num_gcd = num_gcd.gcd(v);
        }
        if scaled[0].is_negative() {
            num_gcd = -num_gcd;
        }
        let terms = self
            .terms
            .iter()
            .zip(scaled)
            .map(|((m, _), v)| {
                (
                    m.clone(),
                    num_rational::BigRational::from_integer(&v / &num_gcd),
                )
            })
            .collect();
        MultiPoly {
            ring: self.ring.clone(),
            terms,
        }
    }
}

/// An endomorphism of a polynomial ring, given by the images of the
/// variables. The maps used here (`Φ#_{d,j}`, variable swaps) send variables
/// to homogeneous linear forms, so they preserve total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingEndo<F: Field> {
    ring: Ring<F>,
    images: Vec<MultiPoly<F>>,
}

impl<F: Field> RingEndo<F> {
    pub fn new(ring: &Ring<F>, images: Vec<MultiPoly<F>>) -> Result<Self, PolyError> {
        if images.len() != ring.nvars {
            return Err(PolyError::BadIndex(format!(
                "endomorphism needs {} images, got {}",
                ring.nvars,
                images.len()
            )));
        }
        for img in &images {
            if img.ring() != ring {
                return Err(PolyError::RingMismatch);
            }
        }
        Ok(RingEndo {
            ring: ring.clone(),
            images,
        })
    }

    pub fn identity(ring: &Ring<F>) -> Self {
        let images = (0..ring.nvars)
            .map(|i| MultiPoly::variable(ring, i))
            .collect();
        RingEndo {
            ring: ring.clone(),
            images,
        }
    }

    pub fn ring(&self) -> &Ring<F> {
        &self.ring
    }

    pub fn images(&self) -> &[MultiPoly<F>] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, img)| *img == MultiPoly::variable(&self.ring, i))
    }

    /// Applies the endomorphism: a ring homomorphism fixing the field.
    pub fn apply(&self, f: &MultiPoly<F>) -> Result<MultiPoly<F>, PolyError> {
        if f.ring() != &self.ring {
            return Err(PolyError::RingMismatch);
        }
        let mut acc = MultiPoly::zero(&self.ring);
        for (m, c) in f.terms() {
            let mut term = MultiPoly::constant(&self.ring, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&self.images[i].pow(e))?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RingEndo<F>) -> Result<RingEndo<F>, PolyError> {
        if self.ring != other.ring {
            return Err(PolyError::RingMismatch);
        }
        let images = other
            .images
            .iter()
            .map(|img| self.apply(img))
            .collect::<Result<Vec<_>, _>>()?;
        RingEndo::new(&self.ring, images)
    }
}

/// The automorphism `Φ#_{d,j}` of `K[x_1..x_d]`: for `j ≤ d` it sends
/// `x_l ↦ x_l - x_j` for `l ≠ j` and `x_j ↦ -x_j`; for `j = d+1` it is the
/// identity.
pub fn phi_endo<F: Field>(ring: &Ring<F>, j: usize) -> Result<RingEndo<F>, PolyError> {
    let d = ring.nvars;
    if j < 1 || j > d + 1 {
        return Err(PolyError::BadIndex(format!(
            "phi index {j} outside [1, {}]",
            d + 1
        )));
    }
    if j == d + 1 {
        return Ok(RingEndo::identity(ring));
    }
    let xj = MultiPoly::variable(ring, j - 1);
    let images = (0..d)
        .map(|l| {
            if l == j - 1 {
                xj.neg()
            } else {
                MultiPoly::variable(ring, l).sub(&xj).expect("same ring")
            }
        })
        .collect();
    RingEndo::new(ring, images)
}

/// The transposition of `x_l` and `x_m` (1-based indices).
pub fn swap_endo<F: Field>(ring: &Ring<F>, l: usize, m: usize) -> Result<RingEndo<F>, PolyError> {
    let n = ring.nvars;
    if l < 1 || l > n || m < 1 || m > n {
        return Err(PolyError::BadIndex(format!(
            "swap indices ({l}, {m}) outside [1, {n}]"
        )));
    }
    let images = (0..n)
        .map(|i| {
            let target = if i == l - 1 {
                m - 1
            } else if i == m - 1 {
                l - 1
            } else {
                i
            };
            MultiPoly::variable(ring, target)
        })
        .collect();
    RingEndo::new(ring, images)
}

/// The elementary symmetric polynomial `e_k` in the ring's variables: the
/// sum of all squarefree degree-`k` monomials. `e_0 = 1`; `k > n` gives 0.
pub fn elementary_symmetric<F: Field>(ring: &Ring<F>, k: usize) -> MultiPoly<F> {
    let n = ring.nvars;
    if k > n {
        return MultiPoly::zero(ring);
    }
    let mut terms = Vec::new();
    let mut subset: Vec<usize> = Vec::with_capacity(k);
    collect_subsets(n, k, 0, &mut subset, &mut |s| {
        let mut exps = vec![0u32; n];
        for &i in s {
            exps[i] = 1;
        }
        terms.push((Monomial::new(exps), ring.field.one()));
    });
    MultiPoly::from_terms(ring, terms)
}

fn collect_subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    let remaining = k - cur.len();
    for i in start..=(n - remaining) {
        cur.push(i);
        collect_subsets(n, k, i + 1, cur, f);
        cur.pop();
    }
}

/// The monomial `x_1 x_2 ⋯ x_n` of the ring.
pub fn product_of_variables<F: Field>(ring: &Ring<F>) -> MultiPoly<F> {
    MultiPoly::from_terms(
        ring,
        vec![(Monomial::new(vec![1; ring.nvars]), ring.field.one())],
    )
}

/// The `i`-th multivariate Hasse-Schmidt derivation on the ring: on a
/// monomial `x^α` it is the sum over weak compositions `j_1+..+j_n = i` of
/// `∏ C(α_t, j_t) · x^{α-j}`, extended linearly. Binomials are computed over
/// the integers and mapped into the field.
pub fn hasse_derivation_multi<F: Field>(f: &MultiPoly<F>, i: u32) -> MultiPoly<F> {
    let ring = f.ring().clone();
    let field = &ring.field;
    let mut out: Vec<(Monomial, F::Elem)> = Vec::new();
    for (m, c) in f.terms() {
        let alpha = m.exps();
        let mut j = vec![0u32; alpha.len()];
        distribute(alpha, i, 0, &mut j, &mut |j| {
            let mut coef = BigInt::from(1);
            for (a, b) in alpha.iter().zip(j.iter()) {
                coef *= binomial(*a as u64, *b as u64);
            }
            let fc = field.from_integer(&coef);
            if field.is_zero(&fc) {
                return;
            }
            let exps: Vec<u32> = alpha.iter().zip(j.iter()).map(|(a, b)| a - b).collect();
            out.push((Monomial::new(exps), field.mul(c, &fc)));
        });
    }
    MultiPoly::from_terms(&ring, out)
}

fn distribute(alpha: &[u32], remaining: u32, pos: usize, cur: &mut [u32], f: &mut impl FnMut(&[u32])) {
    if pos == alpha.len() {
        if remaining == 0 {
            f(cur);
        }
        return;
    }
    let tail: u32 = alpha[pos..].iter().sum();
    if tail < remaining {
        return;
    }
    let top = remaining.min(alpha[pos]);
    for v in 0..=top {
        cur[pos] = v;
        distribute(alpha, remaining - v, pos + 1, cur, f);
    }
    cur[pos] = 0;
}

// ---------------------------------------------------------------------------
// univariate polynomials
// ---------------------------------------------------------------------------

/// A dense univariate polynomial, coefficients low-to-high, trailing zeros
/// trimmed (so the leading coefficient is nonzero unless the polynomial is
/// zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> UniPoly<F> {
    pub fn new(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &F) -> Self {
        UniPoly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: &F, c: F::Elem) -> Self {
        Self::new(field, vec![c])
    }

    pub fn monomial(field: &F, c: F::Elem, e: usize) -> Self {
        let mut coeffs = vec![field.zero(); e + 1];
        coeffs[e] = c;
        Self::new(field, coeffs)
    }

    pub fn x(field: &F) -> Self {
        Self::monomial(field, field.one(), 1)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading_coeff(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(|c| self.field.is_one(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::new(&self.field, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.sub(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::new(&self.field, coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::new(
            &self.field,
            self.coeffs.iter().map(|c| self.field.neg(c)).collect(),
        )
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        Self::new(
            &self.field,
            self.coeffs.iter().map(|a| self.field.mul(a, c)).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = self.field.add(&coeffs[i + j], &self.field.mul(a, b));
            }
        }
        Self::new(&self.field, coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(&self.field, self.field.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = self.field.add(&self.field.mul(&acc, x), c);
        }
        acc
    }

    /// Scales to leading coefficient 1. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => {
                let inv = self.field.inv(lc).expect("leading coefficient nonzero");
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division: `self = q·div + r` with `deg r < deg div`.
    pub fn divrem(&self, div: &Self) -> Result<(Self, Self), PolyError> {
        let dd = div.degree().ok_or(PolyError::ZeroInput("divrem"))?;
        let lc_inv = self.field.inv(div.leading_coeff().unwrap())?;
        let mut rem = self.clone();
        let mut quo = vec![self.field.zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(dr) = rem.degree() {
            if dr < dd {
                break;
            }
            let factor = self.field.mul(rem.leading_coeff().unwrap(), &lc_inv);
            let shift = dr - dd;
            quo[shift] = factor.clone();
            let scaled = div.scale(&factor);
            let mut shifted = vec![self.field.zero(); shift];
            shifted.extend(scaled.coeffs.iter().cloned());
            rem = rem.sub(&Self::new(&self.field, shifted));
        }
        Ok((Self::new(&self.field, quo), rem))
    }

    /// Monic gcd via the Euclidean algorithm. `gcd(f, 0)` is the monic
    /// normalization of `f`; both arguments zero is an error.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::ZeroInput("gcd"));
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// The `i`-th Hasse-Schmidt derivative: coefficient of `x^{k-i}` is
    /// `C(k, i)·a_k`, with the binomial computed over the integers and then
    /// mapped into the field. `i` beyond the degree gives zero; `i = 0` is
    /// the identity.
    pub fn hasse_derivative(&self, i: u32) -> Self {
        let i = i as usize;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(i)
            .map(|(k, a)| {
                let b = self.field.from_integer(&binomial(k as u64, i as u64));
                self.field.mul(a, &b)
            })
            .collect();
        Self::new(&self.field, coeffs)
    }
}

/// Resultant of two nonzero univariate polynomials, as the determinant of
/// the Sylvester matrix by fraction-free (Bareiss) elimination.
///
/// Row convention: the `deg f` shifted copies of `g` come first, then the
/// `deg g` copies of `f`, which fixes `Res(X-a, X-b) = b - a`. Only the
/// vanishing locus is canonical; the sign is this library's convention.
pub fn resultant<F: Field>(f: &UniPoly<F>, g: &UniPoly<F>) -> Result<F::Elem, PolyError> {
    let field = f.field().clone();
    let m = f.degree().ok_or(PolyError::ZeroInput("resultant"))?;
    let n = g.degree().ok_or(PolyError::ZeroInput("resultant"))?;
    if m == 0 {
        // Res(c, g) = c^{deg g}
        let mut acc = field.one();
        for _ in 0..n {
            acc = field.mul(&acc, &f.coeff(0));
        }
        return Ok(acc);
    }
    if n == 0 {
        let mut acc = field.one();
        for _ in 0..m {
            acc = field.mul(&acc, &g.coeff(0));
        }
        return Ok(acc);
    }
    let size = m + n;
    let mut mat = vec![vec![field.zero(); size]; size];
    // m rows of g (coefficients high-to-low), then n rows of f
    for i in 0..m {
        for k in 0..=n {
            mat[i][i + k] = g.coeff(n - k);
        }
    }
    for i in 0..n {
        for k in 0..=m {
            mat[m + i][i + k] = f.coeff(m - k);
        }
    }
    Ok(bareiss_determinant(&field, mat))
}

/// Determinant by Bareiss' fraction-free elimination. Every division is by
/// a previous pivot and is exact.
fn bareiss_determinant<F: Field>(field: &F, mut m: Vec<Vec<F::Elem>>) -> F::Elem {
    let n = m.len();
    if n == 0 {
        return field.one();
    }
    let mut sign_flip = false;
    let mut prev = field.one();
    for k in 0..n - 1 {
        if field.is_zero(&m[k][k]) {
            match (k + 1..n).find(|&r| !field.is_zero(&m[r][k])) {
                Some(r) => {
                    m.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return field.zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = field.mul(&m[i][j], &m[k][k]);
                let b = field.mul(&m[i][k], &m[k][j]);
                let num = field.sub(&a, &b);
                m[i][j] = field.div(&num, &prev).expect("bareiss divisions are exact");
            }
            m[i][k] = field.zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign_flip {
        field.neg(&det)
    } else {
        det
    }
}

// ---------------------------------------------------------------------------
// text grammar
// ---------------------------------------------------------------------------

impl<F: Field> MultiPoly<F> {
    /// Canonical rendering: terms joined by `+`/`-` in descending monomial
    /// order; a term is an optional coefficient `*`-joined with powers
    /// `x<k>^<e>`. Round-trips exactly through [`MultiPoly::parse`].
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let field = &self.ring.field;
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let (neg, abs) = match field.descriptor() {
                FieldDescriptor::Rationals => {
                    let r = render_signed(field, c);
                    (r.0, r.1)
                }
                FieldDescriptor::PrimeField { .. } => (false, field.render(c)),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mono = render_monomial(m);
            if mono.is_empty() {
                out.push_str(&abs);
            } else if abs == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&abs);
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }

    /// Parses the polynomial grammar, extended with parenthesised
    /// subexpressions and powers of groups, e.g. `(x1-2)^3`.
    pub fn parse(ring: &Ring<F>, input: &str) -> Result<Self, PolyError> {
        Parser {
            ring,
            bytes: input.as_bytes(),
            pos: 0,
        }
        .parse_all()
    }
}

fn render_signed<F: Field>(field: &F, c: &F::Elem) -> (bool, String) {
    let s = field.render(c);
    match s.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, s),
    }
}

fn render_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 1 {
            parts.push(format!("x{}", i + 1));
        } else if e > 1 {
            parts.push(format!("x{}^{}", i + 1, e));
        }
    }
    parts.join("*")
}

struct Parser<'a, F: Field> {
    ring: &'a Ring<F>,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a, F: Field> Parser<'a, F> {
    fn err<T>(&self, message: &str) -> Result<T, PolyError> {
        Err(PolyError::Parse {
            position: self.pos,
            message: message.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<MultiPoly<F>, PolyError> {
        let p = self.parse_expr()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return self.err("trailing input");
        }
        Ok(p)
    }

    fn parse_expr(&mut self) -> Result<MultiPoly<F>, PolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.parse_term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.parse_term()?
            }
            _ => self.parse_term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.parse_term()?;
                    acc = acc.add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.parse_term()?;
                    acc = acc.sub(&t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<MultiPoly<F>, PolyError> {
        let mut acc = self.parse_factor()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            let f = self.parse_factor()?;
            acc = acc.mul(&f)?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<MultiPoly<F>, PolyError> {
        let base = self.parse_atom()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            let e = self.parse_uint()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<MultiPoly<F>, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let k = self.parse_uint()? as usize;
                if k < 1 || k > self.ring.nvars {
                    return self.err(&format!(
                        "variable x{k} outside x1..x{}",
                        self.ring.nvars
                    ));
                }
                Ok(MultiPoly::variable(self.ring, k - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let lit = self.parse_coeff_literal()?;
                let val = self
                    .ring
                    .field
                    .parse(&lit)
                    .map_err(|e| PolyError::Parse {
                        position: self.pos,
                        message: e.to_string(),
                    })?;
                Ok(MultiPoly::constant(self.ring, val))
            }
            _ => self.err("expected '(', variable or number"),
        }
    }

    fn parse_uint(&mut self) -> Result<u32, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyError::Parse {
                position: start,
                message: "number too large".to_string(),
            })
    }

    fn parse_coeff_literal(&mut self) -> Result<String, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        // optional /denominator, but only when followed by digits
        if self.bytes.get(self.pos) == Some(&b'/')
            && self
                .bytes
                .get(self.pos + 1)
                .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .to_string())
    }
}

/// Converts a polynomial in a one-variable ring into dense univariate form.
pub fn to_unipoly<F: Field>(f: &MultiPoly<F>) -> Result<UniPoly<F>, PolyError> {
    if f.ring().nvars != 1 {
        return Err(PolyError::RingMismatch);
    }
    let field = f.field().clone();
    let deg = f.total_degree().map(|d| d as usize);
    let mut coeffs = vec![field.zero(); deg.map_or(0, |d| d + 1)];
    for (m, c) in f.terms() {
        coeffs[m.exps()[0] as usize] = c.clone();
    }
    Ok(UniPoly::new(&field, coeffs))
}

/// Views a univariate polynomial as an element of a one-variable ring.
pub fn from_unipoly<F: Field>(ring: &Ring<F>, f: &UniPoly<F>) -> Result<MultiPoly<F>, PolyError> {
    if ring.nvars != 1 {
        return Err(PolyError::RingMismatch);
    }
    let terms = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(e, c)| (Monomial::new(vec![e as u32]), c.clone()))
        .collect();
    Ok(MultiPoly::from_terms(ring, terms))
}

/// Renders a univariate polynomial in the same grammar, variable `x1`.
pub fn render_unipoly<F: Field>(f: &UniPoly<F>) -> String {
    let ring = Ring::new(1, f.field().clone());
    from_unipoly(&ring, f).expect("one variable").render()
}

/// Parses a univariate polynomial (variable `x1`) from the grammar.
pub fn parse_unipoly<F: Field>(field: &F, input: &str) -> Result<UniPoly<F>, PolyError> {
    let ring = Ring::new(1, field.clone());
    to_unipoly(&MultiPoly::parse(&ring, input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::PrimeField;

    fn qring(n: usize) -> Ring<Rationals> {
        Ring::new(n, Rationals)
    }

    fn qp(ring: &Ring<Rationals>, s: &str) -> MultiPoly<Rationals> {
        MultiPoly::parse(ring, s).unwrap()
    }

    #[test]
    fn grevlex_orders_degree_two_monomials() {
        let cmp = MonomialOrder::GrevLex;
        let m = |e: &[u32]| Monomial::new(e.to_vec());
        // x1^2 > x1x2 > x2^2 > x1x3 > x2x3 > x3^2
        let seq = [
            m(&[2, 0, 0]),
            m(&[1, 1, 0]),
            m(&[0, 2, 0]),
            m(&[1, 0, 1]),
            m(&[0, 1, 1]),
            m(&[0, 0, 2]),
        ];
        for w in seq.windows(2) {
            assert_eq!(cmp.cmp(&w[0], &w[1]), Ordering::Greater);
        }
    }

    #[test]
    fn product_and_identity() {
        let r = qring(2);
        let lhs = qp(&r, "x1 + x2").mul(&qp(&r, "x1 - x2")).unwrap();
        assert_eq!(lhs, qp(&r, "x1^2 - x2^2"));
        let f = qp(&r, "x1^2*x2 - 3*x1");
        assert_eq!(f.add(&MultiPoly::zero(&r)).unwrap(), f);
        let r3 = qring(3);
        assert_eq!(
            qp(&r3, "x1*x2").mul(&qp(&r3, "x3")).unwrap(),
            qp(&r3, "x1*x2*x3")
        );
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = qp(&qring(2), "x1");
        let b = qp(&qring(3), "x1");
        assert_eq!(a.add(&b).unwrap_err(), PolyError::RingMismatch);
    }

    #[test]
    fn render_parse_round_trip() {
        let r = qring(3);
        for s in [
            "x1^2*x2 - 3*x3",
            "-x1 + 1/2*x2",
            "0",
            "7",
            "x1*x2*x3 + x2^4 - 2",
        ] {
            let f = qp(&r, s);
            assert_eq!(qp(&r, &f.render()), f);
        }
        let f5 = Ring::new(2, PrimeField::new(5).unwrap());
        let g = MultiPoly::parse(&f5, "3*x1^2 + 4*x2 - 6").unwrap();
        assert_eq!(MultiPoly::parse(&f5, &g.render()).unwrap(), g);
    }

    #[test]
    fn parenthesised_powers_parse() {
        let r = qring(1);
        let f = qp(&r, "(x1-2)^3");
        assert_eq!(f, qp(&r, "x1^3 - 6*x1^2 + 12*x1 - 8"));
    }

    #[test]
    fn parse_error_carries_position() {
        let r = qring(2);
        match MultiPoly::parse(&r, "x1 + @") {
            Err(PolyError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn hasse_univariate_examples() {
        // f = X^3 + X^2, i = 2 over Q -> 3X + 1
        let q = Rationals;
        let f = parse_unipoly(&q, "x1^3 + x1^2").unwrap();
        let d2 = f.hasse_derivative(2);
        assert_eq!(render_unipoly(&d2), "3*x1 + 1");
        // same f, i = 1 over F_2 -> X^2
        let f2 = PrimeField::new(2).unwrap();
        let g = parse_unipoly(&f2, "x1^3 + x1^2").unwrap();
        assert_eq!(render_unipoly(&g.hasse_derivative(1)), "x1^2");
        // i = 0 is the identity
        assert_eq!(f.hasse_derivative(0), f);
        // over F_p, C(p,1) = 0
        let f5 = PrimeField::new(5).unwrap();
        let xp = UniPoly::monomial(&f5, 1, 5);
        assert!(xp.hasse_derivative(1).is_zero());
    }

    #[test]
    fn hasse_multivariate_is_elementary_symmetric() {
        // HD^1_2(x1x2) = x1 + x2, HD^2_3(x1x2x3) = x1 + x2 + x3
        let r2 = qring(2);
        assert_eq!(
            hasse_derivation_multi(&qp(&r2, "x1*x2"), 1),
            qp(&r2, "x1 + x2")
        );
        let r3 = qring(3);
        assert_eq!(
            hasse_derivation_multi(&qp(&r3, "x1*x2*x3"), 2),
            qp(&r3, "x1 + x2 + x3")
        );
        // HD^0 is the identity
        let f = qp(&r3, "x1^2*x3 - x2");
        assert_eq!(hasse_derivation_multi(&f, 0), f);
        // full identity for d <= 7: HD^i(x1..xd) = e_{d-i}
        for d in 1..=7usize {
            let r = qring(d);
            let xs = product_of_variables(&r);
            for i in 0..d as u32 {
                assert_eq!(
                    hasse_derivation_multi(&xs, i),
                    elementary_symmetric(&r, d - i as usize),
                    "d={d}, i={i}"
                );
            }
        }
    }

    #[test]
    fn elementary_symmetric_cases() {
        let r2 = qring(2);
        assert_eq!(elementary_symmetric(&r2, 2), qp(&r2, "x1*x2"));
        let r3 = qring(3);
        assert_eq!(
            elementary_symmetric(&r3, 2),
            qp(&r3, "x1*x2 + x1*x3 + x2*x3")
        );
        assert_eq!(elementary_symmetric(&r3, 0), MultiPoly::one(&r3));
        assert!(elementary_symmetric(&r2, 3).is_zero());
        // e_k(x1..x4) = x4 e_{k-1}(x1..x3) + e_k(x1..x3) at k = 2
        let r4 = qring(4);
        let lhs = elementary_symmetric(&r4, 2);
        let e1_3 = elementary_symmetric(&qring(3), 1).extend_to(&r4).unwrap();
        let e2_3 = elementary_symmetric(&qring(3), 2).extend_to(&r4).unwrap();
        let x4 = MultiPoly::variable(&r4, 3);
        assert_eq!(lhs, x4.mul(&e1_3).unwrap().add(&e2_3).unwrap());
    }

    #[test]
    fn phi_endo_examples() {
        let r2 = qring(2);
        let p21 = phi_endo(&r2, 1).unwrap();
        assert_eq!(p21.images()[0], qp(&r2, "-x1"));
        assert_eq!(p21.images()[1], qp(&r2, "x2 - x1"));
        assert!(phi_endo(&r2, 3).unwrap().is_identity());
        assert!(phi_endo(&r2, 4).is_err());
        // involution for j <= d
        for d in 2..=5usize {
            let r = qring(d);
            for j in 1..=d {
                let p = phi_endo(&r, j).unwrap();
                assert!(p.compose(&p).unwrap().is_identity(), "d={d}, j={j}");
            }
        }
    }

    #[test]
    fn apply_endo_examples() {
        let r2 = qring(2);
        let p21 = phi_endo(&r2, 1).unwrap();
        assert_eq!(p21.apply(&qp(&r2, "x1*x2")).unwrap(), qp(&r2, "x1^2 - x1*x2"));
        let p22 = phi_endo(&r2, 2).unwrap();
        assert_eq!(p22.apply(&qp(&r2, "x1 + x2")).unwrap(), qp(&r2, "x1 - 2*x2"));
        let f = qp(&r2, "x1^3 - x2 + 4");
        assert_eq!(RingEndo::identity(&r2).apply(&f).unwrap(), f);
    }

    #[test]
    fn swap_endo_examples() {
        let r3 = qring(3);
        let s13 = swap_endo(&r3, 1, 3).unwrap();
        assert_eq!(s13.apply(&qp(&r3, "x1*x2")).unwrap(), qp(&r3, "x2*x3"));
        assert!(swap_endo(&r3, 2, 2).unwrap().is_identity());
        let s = swap_endo(&r3, 2, 3).unwrap();
        assert!(s.compose(&s).unwrap().is_identity());
        assert!(swap_endo(&r3, 0, 1).is_err());
    }

    #[test]
    fn last_var_coefficients() {
        let r3 = qring(3);
        // a x3 + b with a = x1, b = x2^2
        let f = qp(&r3, "x1*x3 + x2^2");
        assert_eq!(f.coeff_of_xn_pow(1), qp(&r3, "x1"));
        assert_eq!(f.coeff_of_xn_pow(2), MultiPoly::zero(&r3));
        assert_eq!(f.leading_coeff_in_last_var(), qp(&r3, "x1"));
        assert_eq!(qp(&r3, "x2").coeff_of_xn_pow(1), MultiPoly::zero(&r3));
    }

    #[test]
    fn homogeneity_report() {
        let r2 = qring(2);
        assert_eq!(
            qp(&r2, "x1^2 - x1*x2").homogeneity(),
            Homogeneity::Homogeneous(2)
        );
        assert_eq!(qp(&r2, "x1 + 1").homogeneity(), Homogeneity::Inhomogeneous);
        assert_eq!(MultiPoly::<Rationals>::zero(&r2).homogeneity(), Homogeneity::Zero);
    }

    #[test]
    fn gcd_examples() {
        let q = Rationals;
        let f = parse_unipoly(&q, "(x1-1)^2").unwrap();
        let g = parse_unipoly(&q, "(x1-1)*(x1+1)").unwrap();
        assert_eq!(render_unipoly(&f.gcd(&g).unwrap()), "x1 - 1");
        let f2 = PrimeField::new(2).unwrap();
        let a = parse_unipoly(&f2, "x1^3 + x1^2").unwrap();
        let b = parse_unipoly(&f2, "x1^2").unwrap();
        assert_eq!(render_unipoly(&a.gcd(&b).unwrap()), "x1^2");
        let c = parse_unipoly(&q, "x1^3 - 1").unwrap();
        let d = parse_unipoly(&q, "3*x1^2").unwrap();
        assert_eq!(render_unipoly(&c.gcd(&d).unwrap()), "1");
        // gcd with zero, and the double-zero error
        assert_eq!(
            c.gcd(&UniPoly::zero(&q)).unwrap(),
            c.monic()
        );
        assert!(UniPoly::zero(&q).gcd(&UniPoly::zero(&q)).is_err());
    }

    #[test]
    fn resultant_linear_convention() {
        let q = Rationals;
        // Res(X - a, X - b) = b - a with a = 2, b = 5
        let f = parse_unipoly(&q, "x1 - 2").unwrap();
        let g = parse_unipoly(&q, "x1 - 5").unwrap();
        assert_eq!(resultant(&f, &g).unwrap(), q.from_i64(3));
        // shared root
        let h = parse_unipoly(&q, "(x1-1)^2").unwrap();
        let k = parse_unipoly(&q, "x1^2 - 1").unwrap();
        assert!(q.is_zero(&resultant(&h, &k).unwrap()));
        assert!(resultant(&h, &UniPoly::zero(&q)).is_err());
    }

    #[test]
    fn univariate_matches_multivariate_hasse() {
        let q = Rationals;
        let r1 = qring(1);
        let f = qp(&r1, "x1^4 - 2*x1^2 + 7");
        for i in 0..=5u32 {
            let uni = to_unipoly(&f).unwrap().hasse_derivative(i);
            let multi = hasse_derivation_multi(&f, i);
            assert_eq!(from_unipoly(&r1, &uni).unwrap(), multi, "i={i}");
        }
        let _ = q;
    }

    #[test]
    fn integer_primitive_scaling() {
        let r = qring(2);
        let f = qp(&r, "1/2*x1^2 - 3/4*x1*x2");
        let g = f.integer_primitive();
        assert_eq!(g, qp(&r, "2*x1^2 - 3*x1*x2"));
    }
}
