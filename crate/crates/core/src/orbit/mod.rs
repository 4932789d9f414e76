//! Orbit sums for quarter-plane models: truncated bivariate Laurent series,
//! groups generated by birational substitutions, alternating sums over a
//! group, and positive-part extraction.

pub mod reproduce;

use crate::ring::{Field, PrimeField, Ring};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

pub type Mono = (i64, i64);
/// Finite Laurent polynomial in x and y with exact coefficients.
pub type LaurentXY = BTreeMap<Mono, BigRational>;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("group closure exceeded cap of {0} elements")]
    CapExceeded(usize),
    #[error("sign is not well-defined: words of both parities reach the same element")]
    SignInconsistent,
    #[error("no usable evaluation points found for map equality testing")]
    NoEvaluationPoints,
    #[error("substitution image is not a finite Laurent polynomial: {0}")]
    NotSeriesRepresentable(String),
}

pub fn laurent_zero() -> LaurentXY {
    BTreeMap::new()
}

pub fn laurent_monomial(a: i64, b: i64, c: BigRational) -> LaurentXY {
    let mut l = BTreeMap::new();
    if !c.is_zero() {
        l.insert((a, b), c);
    }
    l
}

pub fn laurent_from_steps(steps: &[(i64, i64)]) -> LaurentXY {
    let mut l = BTreeMap::new();
    for &(dx, dy) in steps {
        *l.entry((dx, dy)).or_insert_with(BigRational::zero) += BigRational::one();
    }
    l
}

pub fn laurent_add_assign(dst: &mut LaurentXY, src: &LaurentXY) {
    for (m, c) in src {
        let e = dst.entry(*m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            dst.remove(m);
        }
    }
}

pub fn laurent_sub(a: &LaurentXY, b: &LaurentXY) -> LaurentXY {
    let mut out = a.clone();
    for (m, c) in b {
        let e = out.entry(*m).or_insert_with(BigRational::zero);
        *e -= c;
        if e.is_zero() {
            out.remove(m);
        }
    }
    out
}

pub fn laurent_scale(l: &LaurentXY, s: &BigRational) -> LaurentXY {
    if s.is_zero() {
        return BTreeMap::new();
    }
    l.iter().map(|(m, c)| (*m, c * s)).collect()
}

pub fn laurent_mul(a: &LaurentXY, b: &LaurentXY) -> LaurentXY {
    let mut out = BTreeMap::new();
    for ((ax, ay), ac) in a {
        for ((bx, by), bc) in b {
            let m = (ax + bx, ay + by);
            let e = out.entry(m).or_insert_with(BigRational::zero);
            *e += ac * bc;
        }
    }
    out.retain(|_, c: &mut BigRational| !c.is_zero());
    out
}

pub fn laurent_pow(l: &LaurentXY, e: u32) -> LaurentXY {
    let mut out = laurent_monomial(0, 0, BigRational::one());
    for _ in 0..e {
        out = laurent_mul(&out, l);
    }
    out
}

/// Inverse of a single monomial; anything with more terms has no finite
/// Laurent inverse.
pub fn laurent_recip(l: &LaurentXY) -> Option<LaurentXY> {
    if l.len() != 1 {
        return None;
    }
    let ((a, b), c) = l.iter().next().unwrap();
    Some(laurent_monomial(-a, -b, BigRational::one() / c))
}

/// Power series in t whose coefficients are finite Laurent polynomials in
/// x and y, truncated after t^n_max. Arithmetic never extends the
/// truncation: combining two series keeps the shorter order range.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedLaurent {
    pub orders: Vec<LaurentXY>,
}

impl TruncatedLaurent {
    pub fn zero(n_max: usize) -> Self {
        TruncatedLaurent { orders: vec![BTreeMap::new(); n_max + 1] }
    }

    /// Constant in t.
    pub fn constant(l: LaurentXY, n_max: usize) -> Self {
        let mut s = Self::zero(n_max);
        s.orders[0] = l;
        s
    }

    pub fn n_max(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn order(&self, n: usize) -> &LaurentXY {
        &self.orders[n]
    }

    pub fn coeff(&self, n: usize, m: Mono) -> BigRational {
        self.orders
            .get(n)
            .and_then(|l| l.get(&m))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.n_max().min(other.n_max());
        let mut out = Self::zero(n);
        for k in 0..=n {
            out.orders[k] = self.orders[k].clone();
            laurent_add_assign(&mut out.orders[k], &other.orders[k]);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.n_max().min(other.n_max());
        let mut out = Self::zero(n);
        for k in 0..=n {
            out.orders[k] = laurent_sub(&self.orders[k], &other.orders[k]);
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        TruncatedLaurent { orders: self.orders.iter().map(|l| laurent_scale(l, s)).collect() }
    }

    /// Multiplication by a Laurent polynomial, order by order.
    pub fn mul_laurent(&self, l: &LaurentXY) -> Self {
        TruncatedLaurent { orders: self.orders.iter().map(|o| laurent_mul(o, l)).collect() }
    }

    /// Multiplication by t^k: shifts orders up and drops the overflow.
    pub fn mul_t(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n_max());
        for n in k..=self.n_max() {
            out.orders[n] = self.orders[n - k].clone();
        }
        out
    }

    pub fn shift(&self, dx: i64, dy: i64) -> Self {
        TruncatedLaurent {
            orders: self
                .orders
                .iter()
                .map(|l| l.iter().map(|((a, b), c)| ((a + dx, b + dy), c.clone())).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.orders.iter().all(|l| l.is_empty())
    }

    /// First (order, monomial) where the two series differ, scanning orders
    /// up to the shared truncation.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, Mono, BigRational, BigRational)> {
        let n = self.n_max().min(other.n_max());
        for k in 0..=n {
            let mut monos: Vec<Mono> = self.orders[k].keys().chain(other.orders[k].keys()).copied().collect();
            monos.sort();
            monos.dedup();
            for m in monos {
                let a = self.coeff(k, m);
                let b = other.coeff(k, m);
                if a != b {
                    return Some((k, m, a, b));
                }
            }
        }
        None
    }
}

/// Keeps only monomials with strictly positive exponents in both variables.
pub fn positive_part(s: &TruncatedLaurent) -> TruncatedLaurent {
    TruncatedLaurent {
        orders: s
            .orders
            .iter()
            .map(|l| l.iter().filter(|((a, b), _)| *a > 0 && *b > 0).map(|(m, c)| (*m, c.clone())).collect())
            .collect(),
    }
}

/// Rational expression in x and y built from variables, integer constants,
/// sums, products and reciprocals.
#[derive(Clone, Debug)]
pub enum Expr {
    X,
    Y,
    Int(i64),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Recip(Box<Expr>),
}

impl Expr {
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn recip(a: Expr) -> Expr {
        Expr::Recip(Box::new(a))
    }

    fn eval_mod(&self, f: &PrimeField, x: u64, y: u64) -> Option<u64> {
        Some(match self {
            Expr::X => x,
            Expr::Y => y,
            Expr::Int(n) => f.from_i64(*n),
            Expr::Add(a, b) => f.add(&a.eval_mod(f, x, y)?, &b.eval_mod(f, x, y)?),
            Expr::Mul(a, b) => f.mul(&a.eval_mod(f, x, y)?, &b.eval_mod(f, x, y)?),
            Expr::Recip(a) => f.inv(&a.eval_mod(f, x, y)?)?,
        })
    }

    fn subst(&self, fx: &Expr, fy: &Expr) -> Expr {
        match self {
            Expr::X => fx.clone(),
            Expr::Y => fy.clone(),
            Expr::Int(n) => Expr::Int(*n),
            Expr::Add(a, b) => Expr::add(a.subst(fx, fy), b.subst(fx, fy)),
            Expr::Mul(a, b) => Expr::mul(a.subst(fx, fy), b.subst(fx, fy)),
            Expr::Recip(a) => Expr::recip(a.subst(fx, fy)),
        }
    }

    /// Finite Laurent form if one exists; reciprocals are only invertible
    /// when their body reduces to a single monomial.
    fn to_laurent(&self) -> Option<LaurentXY> {
        Some(match self {
            Expr::X => laurent_monomial(1, 0, BigRational::one()),
            Expr::Y => laurent_monomial(0, 1, BigRational::one()),
            Expr::Int(n) => laurent_monomial(0, 0, BigRational::from_integer((*n).into())),
            Expr::Add(a, b) => {
                let mut l = a.to_laurent()?;
                laurent_add_assign(&mut l, &b.to_laurent()?);
                l
            }
            Expr::Mul(a, b) => laurent_mul(&a.to_laurent()?, &b.to_laurent()?),
            Expr::Recip(a) => laurent_recip(&a.to_laurent()?)?,
        })
    }

    fn describe(&self) -> String {
        match self {
            Expr::X => "x".into(),
            Expr::Y => "y".into(),
            Expr::Int(n) => n.to_string(),
            Expr::Add(a, b) => format!("({} + {})", a.describe(), b.describe()),
            Expr::Mul(a, b) => format!("({} * {})", a.describe(), b.describe()),
            Expr::Recip(a) => format!("1/{}", a.describe()),
        }
    }
}

/// Substitution (x, y) -> (x_to, y_to).
#[derive(Clone, Debug)]
pub struct BirationalMap {
    pub x_to: Expr,
    pub y_to: Expr,
}

impl BirationalMap {
    pub fn new(x_to: Expr, y_to: Expr) -> Self {
        BirationalMap { x_to, y_to }
    }

    pub fn identity() -> Self {
        BirationalMap { x_to: Expr::X, y_to: Expr::Y }
    }

    /// outer after inner: apply inner to a point first, then outer.
    pub fn compose(outer: &BirationalMap, inner: &BirationalMap) -> BirationalMap {
        BirationalMap {
            x_to: outer.x_to.subst(&inner.x_to, &inner.y_to),
            y_to: outer.y_to.subst(&inner.x_to, &inner.y_to),
        }
    }

    fn fingerprint(&self, f: &PrimeField, points: &[(u64, u64)]) -> Option<Vec<(u64, u64)>> {
        points
            .iter()
            .map(|&(x, y)| Some((self.x_to.eval_mod(f, x, y)?, self.y_to.eval_mod(f, x, y)?)))
            .collect()
    }
}

pub struct GroupElement {
    pub map: BirationalMap,
    pub sign: i64,
    pub word_len: usize,
}

/// Equality of maps is decided by evaluation at this many random points
/// over a large prime field. Two distinct maps in the grammar agree on a
/// random point with probability O(degree/p), so five points over a 31-bit
/// prime leave a negligible collision chance.
const EQUALITY_POINTS: usize = 5;
const EQUALITY_PRIME: u64 = (1 << 31) - 1;
const CLOSURE_RESTARTS: u64 = 32;

/// Closure of the generators under composition, breadth-first, so each
/// element carries its shortest word length. The sign of an element is
/// (-1)^(word length); the closure fails if two words of different parity
/// reach the same element, or if the closure grows past `cap`.
pub fn generate_group(generators: &[BirationalMap], cap: usize) -> Result<Vec<GroupElement>, OrbitError> {
    let f = PrimeField::new(EQUALITY_PRIME);
    'attempt: for seed in 0..CLOSURE_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0b17_5000 + seed);
        let points: Vec<(u64, u64)> =
            (0..EQUALITY_POINTS).map(|_| (rng.gen_range(2..EQUALITY_PRIME - 2), rng.gen_range(2..EQUALITY_PRIME - 2))).collect();
        let mut elements: Vec<GroupElement> = Vec::new();
        let mut seen: BTreeMap<Vec<(u64, u64)>, usize> = BTreeMap::new();
        let id = BirationalMap::identity();
        let Some(fp) = id.fingerprint(&f, &points) else { continue 'attempt };
        seen.insert(fp, 0);
        elements.push(GroupElement { map: id, sign: 1, word_len: 0 });
        let mut frontier = vec![0usize];
        while let Some(&idx) = frontier.first() {
            frontier.remove(0);
            for gen in generators {
                let m = BirationalMap::compose(&elements[idx].map, gen);
                let Some(fp) = m.fingerprint(&f, &points) else { continue 'attempt };
                let word = elements[idx].word_len + 1;
                match seen.get(&fp) {
                    Some(&i) => {
                        if elements[i].word_len % 2 != word % 2 {
                            return Err(OrbitError::SignInconsistent);
                        }
                    }
                    None => {
                        if elements.len() == cap {
                            return Err(OrbitError::CapExceeded(cap));
                        }
                        seen.insert(fp, elements.len());
                        frontier.push(elements.len());
                        elements.push(GroupElement {
                            map: m,
                            sign: if word % 2 == 0 { 1 } else { -1 },
                            word_len: word,
                        });
                    }
                }
            }
        }
        return Ok(elements);
    }
    Err(OrbitError::NoEvaluationPoints)
}

/// Image of a series under a substitution map, order by order. Each
/// monomial x^a y^b maps to x_to^a * y_to^b, which only exists as a finite
/// Laurent polynomial when the needed reciprocals are monomials.
pub fn apply_map(s: &TruncatedLaurent, map: &BirationalMap) -> Result<TruncatedLaurent, OrbitError> {
    let lx = map
        .x_to
        .to_laurent()
        .ok_or_else(|| OrbitError::NotSeriesRepresentable(map.x_to.describe()))?;
    let ly = map
        .y_to
        .to_laurent()
        .ok_or_else(|| OrbitError::NotSeriesRepresentable(map.y_to.describe()))?;
    let mut pow_x: BTreeMap<i64, LaurentXY> = BTreeMap::new();
    let mut pow_y: BTreeMap<i64, LaurentXY> = BTreeMap::new();
    let powered = |base: &LaurentXY, cache: &mut BTreeMap<i64, LaurentXY>, e: i64, what: &Expr| {
        if let Some(p) = cache.get(&e) {
            return Ok(p.clone());
        }
        let p = if e >= 0 {
            laurent_pow(base, e as u32)
        } else {
            let r = laurent_recip(base)
                .ok_or_else(|| OrbitError::NotSeriesRepresentable(format!("1/{}", what.describe())))?;
            laurent_pow(&r, (-e) as u32)
        };
        cache.insert(e, p.clone());
        Ok(p)
    };
    let mut out = TruncatedLaurent::zero(s.n_max());
    for (n, level) in s.orders.iter().enumerate() {
        for ((a, b), c) in level {
            let xa = powered(&lx, &mut pow_x, *a, &map.x_to)?;
            let yb = powered(&ly, &mut pow_y, *b, &map.y_to)?;
            let term = laurent_scale(&laurent_mul(&xa, &yb), c);
            laurent_add_assign(&mut out.orders[n], &term);
        }
    }
    Ok(out)
}

/// Alternating sum of the group images of a series.
pub fn orbit_sum(s: &TruncatedLaurent, group: &[GroupElement]) -> Result<TruncatedLaurent, OrbitError> {
    let mut out = TruncatedLaurent::zero(s.n_max());
    for g in group {
        let image = apply_map(s, &g.map)?;
        let signed = if g.sign < 0 { image.scale(&-BigRational::one()) } else { image };
        out = out.add(&signed);
    }
    Ok(out)
}
