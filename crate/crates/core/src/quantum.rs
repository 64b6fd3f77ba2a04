//! Finite-support Hilbert spaces over sets of motifs.
//!
//! A family of combinatorial objects (mosaics, Gauss words, graphs, group
//! words, enhanced states) is turned into an orthonormal basis; a group
//! acting on the objects by permutations acts on the span by unitaries.
//! Vectors are sparse maps from [`BasisKet`] to an amplitude, which is
//! either a float complex number or an exact Laurent polynomial in `q`.
//! Unitaries are never materialized as matrices; they act ket by ket.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::laurent::{Laurent, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Mosaic,
    Gauss,
    Graph,
    Word,
    EnhancedState,
}

impl Family {
    fn tag(self) -> u8 {
        match self {
            Family::Mosaic => 0,
            Family::Gauss => 1,
            Family::Graph => 2,
            Family::Word => 3,
            Family::EnhancedState => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Mosaic => "mosaic",
            Family::Gauss => "gauss",
            Family::Graph => "graph",
            Family::Word => "word",
            Family::EnhancedState => "enhanced-state",
        }
    }
}

/// An object that can label a basis vector.
pub trait Motif {
    const FAMILY: Family;

    /// Canonical payload; must be injective within the family.
    fn encode(&self) -> Vec<u8>;

    fn validate(&self) -> Result<()> {
        Ok(())
    }

    fn to_ket(&self) -> Result<BasisKet> {
        self.validate()?;
        Ok(BasisKet::new(Self::FAMILY, self.encode()))
    }
}

/// A basis element: family tag plus canonical payload bytes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKet {
    family: Family,
    payload: Vec<u8>,
}

impl BasisKet {
    pub fn new(family: Family, payload: Vec<u8>) -> Self {
        BasisKet { family, payload }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// Length-prefixed serialized form: family tag, u32 length, payload.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.payload.len() + 5);
        out.push(self.family.tag());
        out.extend_from_slice(&(self.payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }
}

impl fmt::Debug for BasisKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}:", self.family.name())?;
        for b in &self.payload {
            write!(f, "{b:02x}")?;
        }
        f.write_str(">")
    }
}

/// Coefficient ring for state vectors.
pub trait Amplitude: Clone + fmt::Debug + PartialEq {
    fn is_zero_amp(&self) -> bool;
    fn add_amp(&self, other: &Self) -> Self;
    fn mul_amp(&self, other: &Self) -> Self;
    /// Complex conjugate (for polynomials: conjugation with the variable on
    /// the unit circle, i.e. `q -> q^{-1}`).
    fn conj_amp(&self) -> Self;
    fn unit_amp() -> Self;
    fn zero_amp() -> Self;
}

impl Amplitude for Complex64 {
    fn is_zero_amp(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_amp(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_amp(&self, other: &Self) -> Self {
        self * other
    }
    fn conj_amp(&self) -> Self {
        self.conj()
    }
    fn unit_amp() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn zero_amp() -> Self {
        Complex64::zero()
    }
}

impl Amplitude for Laurent {
    fn is_zero_amp(&self) -> bool {
        self.is_zero()
    }
    fn add_amp(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_amp(&self, other: &Self) -> Self {
        self * other
    }
    fn conj_amp(&self) -> Self {
        self.invert_variable()
    }
    fn unit_amp() -> Self {
        Laurent::one(Var::Q)
    }
    fn zero_amp() -> Self {
        Laurent::zero(Var::Q)
    }
}

/// A finite linear combination of basis kets from a single family.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<C: Amplitude = Complex64> {
    family: Family,
    amps: BTreeMap<BasisKet, C>,
}

impl<C: Amplitude> StateVector<C> {
    pub fn zero(family: Family) -> Self {
        StateVector {
            family,
            amps: BTreeMap::new(),
        }
    }

    pub fn basis(ket: BasisKet) -> Self {
        let mut v = Self::zero(ket.family());
        v.amps.insert(ket, C::unit_amp());
        v
    }

    /// Sum of weighted kets; like terms are collected.
    pub fn superpose<I>(family: Family, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (C, BasisKet)>,
    {
        let mut v = Self::zero(family);
        for (c, k) in terms {
            v.add_term(k, c)?;
        }
        Ok(v)
    }

    pub fn add_term(&mut self, ket: BasisKet, amp: C) -> Result<()> {
        if ket.family() != self.family {
            return Err(Error::FamilyMismatch {
                left: self.family.name().into(),
                right: ket.family().name().into(),
            });
        }
        let merged = match self.amps.remove(&ket) {
            Some(old) => old.add_amp(&amp),
            None => amp,
        };
        if !merged.is_zero_amp() {
            self.amps.insert(ket, merged);
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, ket: &BasisKet) -> Option<&C> {
        self.amps.get(ket)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisKet, &C)> {
        self.amps.iter()
    }

    fn check_family(&self, other: Family) -> Result<()> {
        if self.family != other {
            return Err(Error::FamilyMismatch {
                left: self.family.name().into(),
                right: other.name().into(),
            });
        }
        Ok(())
    }

    /// Hermitian inner product, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector<C>) -> Result<C> {
        self.check_family(other.family)?;
        let mut acc = C::zero_amp();
        let (small, large, flip) = if self.amps.len() <= other.amps.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        for (k, a) in &small.amps {
            if let Some(b) = large.amps.get(k) {
                let term = if flip {
                    b.conj_amp().mul_amp(a)
                } else {
                    a.conj_amp().mul_amp(b)
                };
                acc = acc.add_amp(&term);
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.family);
        for (k, a) in &self.amps {
            let v = a.mul_amp(c);
            if !v.is_zero_amp() {
                out.amps.insert(k.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_family(other.family)?;
        let mut out = self.clone();
        for (k, a) in &other.amps {
            out.add_term(k.clone(), a.clone())?;
        }
        Ok(out)
    }
}

impl StateVector<Complex64> {
    pub fn norm(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Unit vector on one motif.
pub fn ket<M: Motif>(motif: &M) -> Result<StateVector> {
    Ok(StateVector::basis(motif.to_ket()?))
}

pub fn inner_product<C: Amplitude>(u: &StateVector<C>, v: &StateVector<C>) -> Result<C> {
    u.inner(v)
}

type KetMap = Arc<dyn Fn(&BasisKet) -> Option<BasisKet> + Send + Sync>;

/// Unitary induced by an injective partial map on basis kets.
///
/// `forward(k) == None` means `k` is outside the declared domain.
#[derive(Clone)]
pub struct PermutationUnitary {
    family: Family,
    name: String,
    forward: KetMap,
    inverse: KetMap,
}

impl fmt::Debug for PermutationUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationUnitary")
            .field("family", &self.family)
            .field("name", &self.name)
            .finish()
    }
}

impl PermutationUnitary {
    pub fn new<F, G>(family: Family, name: impl Into<String>, forward: F, inverse: G) -> Self
    where
        F: Fn(&BasisKet) -> Option<BasisKet> + Send + Sync + 'static,
        G: Fn(&BasisKet) -> Option<BasisKet> + Send + Sync + 'static,
    {
        PermutationUnitary {
            family,
            name: name.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
        }
    }

    pub fn identity(family: Family) -> Self {
        Self::new(family, "id", |k| Some(k.clone()), |k| Some(k.clone()))
    }

    /// Finite permutation given by explicit `(from, to)` pairs; kets not
    /// listed are fixed. Fails if the pairs are not a bijection.
    pub fn from_pairs(family: Family, name: impl Into<String>, pairs: Vec<(BasisKet, BasisKet)>) -> Result<Self> {
        let mut fwd = HashMap::new();
        let mut inv = HashMap::new();
        for (a, b) in pairs {
            if fwd.insert(a.clone(), b.clone()).is_some() || inv.insert(b, a).is_some() {
                return Err(Error::NotBijection("repeated ket in permutation pairs".into()));
            }
        }
        for k in fwd.keys() {
            if !inv.contains_key(k) {
                return Err(Error::NotBijection(format!("{k:?} has no preimage")));
            }
        }
        let (fwd, inv) = (Arc::new(fwd), Arc::new(inv));
        Ok(Self::new(
            family,
            name,
            move |k| Some(fwd.get(k).cloned().unwrap_or_else(|| k.clone())),
            move |k| Some(inv.get(k).cloned().unwrap_or_else(|| k.clone())),
        ))
    }

    /// Transposition of two kets.
    pub fn transposition(a: BasisKet, b: BasisKet) -> Result<Self> {
        let fam = a.family();
        if a == b {
            return Ok(Self::identity(fam));
        }
        Self::from_pairs(fam, "transposition", vec![(a.clone(), b.clone()), (b, a)])
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn map(&self, k: &BasisKet) -> Option<BasisKet> {
        (self.forward)(k)
    }

    pub fn map_inverse(&self, k: &BasisKet) -> Option<BasisKet> {
        (self.inverse)(k)
    }

    pub fn inverse(&self) -> PermutationUnitary {
        PermutationUnitary {
            family: self.family,
            name: format!("{}^-1", self.name),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PermutationUnitary) -> PermutationUnitary {
        let (f1, f2) = (self.forward.clone(), other.forward.clone());
        let (i1, i2) = (self.inverse.clone(), other.inverse.clone());
        PermutationUnitary {
            family: self.family,
            name: format!("{}*{}", self.name, other.name),
            forward: Arc::new(move |k| f2(k).and_then(|m| f1(&m))),
            inverse: Arc::new(move |k| i1(k).and_then(|m| i2(&m))),
        }
    }

    pub fn apply<C: Amplitude>(&self, v: &StateVector<C>) -> Result<StateVector<C>> {
        if v.family() != self.family {
            return Err(Error::FamilyMismatch {
                left: self.family.name().into(),
                right: v.family().name().into(),
            });
        }
        let mut out = StateVector::zero(self.family);
        for (k, a) in v.iter() {
            let image = self
                .map(k)
                .ok_or_else(|| Error::OutsideDomain(format!("{k:?}")))?;
            out.add_term(image, a.clone())?;
        }
        Ok(out)
    }
}

pub fn apply_permutation<C: Amplitude>(u: &PermutationUnitary, v: &StateVector<C>) -> Result<StateVector<C>> {
    u.apply(v)
}

type Eigen = Arc<dyn Fn(&BasisKet) -> Option<Complex64> + Send + Sync>;

/// Unitary that is diagonal in the ket basis.
#[derive(Clone)]
pub struct DiagonalUnitary {
    family: Family,
    eigenvalue: Eigen,
}

impl fmt::Debug for DiagonalUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiagonalUnitary").field("family", &self.family).finish()
    }
}

pub const UNIT_TOLERANCE: f64 = 1e-12;

impl DiagonalUnitary {
    pub fn new<F>(family: Family, eigenvalue: F) -> Self
    where
        F: Fn(&BasisKet) -> Option<Complex64> + Send + Sync + 'static,
    {
        DiagonalUnitary {
            family,
            eigenvalue: Arc::new(eigenvalue),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn eigenvalue(&self, k: &BasisKet) -> Result<Complex64> {
        let lambda = (self.eigenvalue)(k).ok_or_else(|| Error::OutsideDomain(format!("{k:?}")))?;
        if (lambda.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnitCircle(lambda.norm()));
        }
        Ok(lambda)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::zero(self.family);
        for (k, a) in v.iter() {
            out.add_term(k.clone(), a * self.eigenvalue(k)?)?;
        }
        Ok(out)
    }

    /// `<u|U|v>` computed without building `U|v>` as a separate vector.
    pub fn matrix_element(&self, u: &StateVector, v: &StateVector) -> Result<Complex64> {
        if u.family() != v.family() {
            return Err(Error::FamilyMismatch {
                left: u.family().name().into(),
                right: v.family().name().into(),
            });
        }
        let mut acc = Complex64::zero();
        for (k, a) in u.iter() {
            if let Some(b) = v.amplitude(k) {
                acc += a.conj() * self.eigenvalue(k)? * b;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k(n: u8) -> BasisKet {
        BasisKet::new(Family::Word, vec![n])
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn superposition_norm_and_merge() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = StateVector::superpose(Family::Word, [(c(h, 0.0), k(1)), (c(h, 0.0), k(2))]).unwrap();
        assert_eq!(v.support_len(), 2);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let w = StateVector::superpose(Family::Word, [(c(h, 0.0), k(1)), (c(h, 0.0), k(1))]).unwrap();
        assert_eq!(w.support_len(), 1);
        assert!((w.amplitude(&k(1)).unwrap().re - 2.0 * h).abs() < 1e-15);
    }

    #[test]
    fn kronecker_and_sesquilinear() {
        let a = StateVector::<Complex64>::basis(k(1));
        let b = StateVector::<Complex64>::basis(k(2));
        assert_eq!(a.inner(&a).unwrap(), c(1.0, 0.0));
        assert_eq!(a.inner(&b).unwrap(), c(0.0, 0.0));
        let (x, y, z) = (c(1.0, 2.0), c(-0.5, 0.25), c(0.3, -0.7));
        let u = StateVector::superpose(Family::Word, [(x, k(1)), (y, k(2))]).unwrap();
        let v = StateVector::superpose(Family::Word, [(z, k(1))]).unwrap();
        assert!((u.inner(&v).unwrap() - x.conj() * z).norm() < 1e-15);
    }

    #[test]
    fn family_mismatch_rejected() {
        let a = StateVector::<Complex64>::basis(k(1));
        let b = StateVector::<Complex64>::basis(BasisKet::new(Family::Graph, vec![1]));
        assert!(matches!(a.inner(&b), Err(Error::FamilyMismatch { .. })));
    }

    #[test]
    fn transposition_swaps_amplitudes() {
        let (x, y) = (c(0.6, 0.0), c(0.0, 0.8));
        let v = StateVector::superpose(Family::Word, [(x, k(1)), (y, k(2))]).unwrap();
        let t = PermutationUnitary::transposition(k(1), k(2)).unwrap();
        let w = t.apply(&v).unwrap();
        assert_eq!(w.amplitude(&k(1)), Some(&y));
        assert_eq!(w.amplitude(&k(2)), Some(&x));
        assert_eq!(PermutationUnitary::identity(Family::Word).apply(&v).unwrap(), v);
    }

    #[test]
    fn outside_domain_names_ket() {
        let partial = PermutationUnitary::new(
            Family::Word,
            "partial",
            |b| (b.payload()[0] < 5).then(|| b.clone()),
            |b| Some(b.clone()),
        );
        let v = StateVector::<Complex64>::basis(k(9));
        match partial.apply(&v) {
            Err(Error::OutsideDomain(s)) => assert!(s.contains("09")),
            other => panic!("{other:?}"),
        }
    }

    fn rotate(by: u8) -> PermutationUnitary {
        PermutationUnitary::new(
            Family::Word,
            format!("rot{by}"),
            move |b| Some(BasisKet::new(Family::Word, vec![(b.payload()[0] + by) % 16])),
            move |b| Some(BasisKet::new(Family::Word, vec![(b.payload()[0] + 16 - by) % 16])),
        )
    }

    fn random_vector(rng: &mut ChaCha8Rng, support: usize) -> StateVector {
        let terms: Vec<_> = (0..support)
            .map(|_| (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), k(rng.gen_range(0..16))))
            .collect();
        StateVector::superpose(Family::Word, terms).unwrap()
    }

    #[test]
    fn composition_matches_double_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let swap = PermutationUnitary::transposition(k(3), k(11)).unwrap();
        let g = rotate(5);
        let gh = g.compose(&swap);
        for _ in 0..50 {
            let v = random_vector(&mut rng, 5);
            let direct = g.apply(&swap.apply(&v).unwrap()).unwrap();
            assert_eq!(gh.apply(&v).unwrap(), direct);
            assert_eq!(gh.inverse().apply(&direct).unwrap(), v);
        }
    }

    #[test]
    fn permutations_preserve_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = rotate(3).compose(&PermutationUnitary::transposition(k(0), k(7)).unwrap());
        for _ in 0..100 {
            let u = random_vector(&mut rng, 6);
            let v = random_vector(&mut rng, 6);
            let before = u.inner(&v).unwrap();
            let after = g.apply(&u).unwrap().inner(&g.apply(&v).unwrap()).unwrap();
            assert!((before - after).norm() <= 1e-12);
        }
    }

    #[test]
    fn exact_carrier_inner_product_is_exact() {
        let a = Laurent::from_terms(Var::Q, [(1, 2), (-1, 1)]);
        let b = Laurent::from_terms(Var::Q, [(0, 3)]);
        let u = StateVector::superpose(Family::Word, [(a.clone(), k(1)), (b.clone(), k(2))]).unwrap();
        let g = rotate(1);
        let expected = &(&a.invert_variable() * &a) + &(&b * &b);
        assert_eq!(u.inner(&u).unwrap(), expected);
        let gu = g.apply(&u).unwrap();
        assert_eq!(gu.inner(&gu).unwrap(), expected);
    }

    #[test]
    fn diagonal_unitary_checks_modulus() {
        let d = DiagonalUnitary::new(Family::Word, |b| Some(Complex64::from_polar(1.0, b.payload()[0] as f64)));
        let v = StateVector::<Complex64>::basis(k(2));
        let w = d.apply(&v).unwrap();
        assert_eq!(w.support_len(), 1);
        assert!((w.norm() - 1.0).abs() < 1e-12);
        let bad = DiagonalUnitary::new(Family::Word, |_| Some(c(2.0, 0.0)));
        assert!(matches!(bad.apply(&v), Err(Error::NotUnitCircle(_))));
    }
}
