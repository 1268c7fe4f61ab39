//! Finitely generated abelian groups in canonical invariant-factor form,
//! their elements and homomorphisms, automorphism enumeration, and the
//! group-spec parser.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::intlin::{self, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group spec parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0} requires a finite group (or an explicit window)")]
    InfiniteGroup(&'static str),
    #[error("group is too large to enumerate")]
    TooLarge,
    #[error("matrix is {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    BadShape {
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("matrix does not define a homomorphism: image of relation {index} leaves the target relation lattice")]
    NotWellDefined { index: usize },
    #[error("source and target of the homomorphisms do not compose")]
    CompositionMismatch,
    #[error("homomorphism is not invertible")]
    NotInvertible,
    #[error("expected an endomorphism (source = target)")]
    NotEndomorphism,
}

/// A finitely generated abelian group `Z^free_rank + Z/d_1 + ... + Z/d_k`
/// with `2 <= d_1 | d_2 | ... | d_k` (canonical invariant factors).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FgAbelianGroup {
    torsion: Vec<BigInt>,
    free_rank: usize,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        FgAbelianGroup {
            torsion: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup {
            torsion: Vec::new(),
            free_rank: rank,
        }
    }

    /// Cyclic group of order `n >= 1`; `n = 1` yields the trivial group.
    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        let n = n.into();
        assert!(n.is_positive(), "cyclic group order must be positive");
        if n.is_one() {
            Self::trivial()
        } else {
            FgAbelianGroup {
                torsion: vec![n],
                free_rank: 0,
            }
        }
    }

    /// Canonical form of `Z^free_rank + sum of Z/order`, for arbitrary
    /// positive orders: the diagonal relation matrix is put in Smith normal
    /// form and its invariant factors are taken.
    pub fn from_orders(orders: &[BigInt], free_rank: usize) -> Self {
        assert!(
            orders.iter().all(|d| d.is_positive()),
            "orders must be positive"
        );
        let snf = intlin::smith_normal_form(&IntMatrix::diagonal(orders));
        Self::from_invariant_factors(&snf.diagonal, free_rank)
    }

    /// Builds from an already-divisible chain, dropping unit factors.
    pub fn from_invariant_factors(chain: &[BigInt], free_rank: usize) -> Self {
        debug_assert!(
            chain.windows(2).all(|w| (&w[1] % &w[0]).is_zero()),
            "not a divisibility chain"
        );
        let torsion: Vec<BigInt> = chain.iter().filter(|d| !d.is_one()).cloned().collect();
        FgAbelianGroup { torsion, free_rank }
    }

    pub fn direct_sum(&self, other: &FgAbelianGroup) -> Self {
        let mut orders = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        Self::from_orders(&orders, self.free_rank + other.free_rank)
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn num_generators(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Order of the group; `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if !self.is_finite() {
            return None;
        }
        Some(self.torsion.iter().product())
    }

    /// Relation matrix of the canonical presentation: generators `e_i`,
    /// relations `d_i e_i` for the torsion generators. Shape
    /// `num_generators x torsion_count`.
    pub fn relation_matrix(&self) -> IntMatrix {
        let n = self.num_generators();
        let k = self.torsion.len();
        IntMatrix::from_fn(n, k, |i, j| {
            if i == j {
                self.torsion[j].clone()
            } else {
                BigInt::zero()
            }
        })
    }

    /// Element with the given coordinates, reduced into canonical range.
    /// Panics if the coordinate count is wrong.
    pub fn element(&self, coords: Vec<BigInt>) -> GroupElement {
        GroupElement::new(self.clone(), coords)
    }

    pub fn element_i64(&self, coords: &[i64]) -> GroupElement {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(&self) -> GroupElement {
        self.element(vec![BigInt::zero(); self.num_generators()])
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut coords = vec![BigInt::zero(); self.num_generators()];
        coords[i] = BigInt::one();
        self.element(coords)
    }

    /// All elements of a finite group, exactly once, in lexicographic
    /// coordinate order (the canonical element order).
    pub fn enumerate_elements(&self) -> Result<Vec<GroupElement>, GroupError> {
        if !self.is_finite() {
            return Err(GroupError::InfiniteGroup("element enumeration"));
        }
        self.enumerate_elements_windowed(0)
    }

    /// Element enumeration with free coordinates restricted to `[-window, window]`
    /// (experimental mode for groups with free part). Lexicographic order.
    pub fn enumerate_elements_windowed(
        &self,
        window: u64,
    ) -> Result<Vec<GroupElement>, GroupError> {
        let mut ranges: Vec<Vec<BigInt>> = Vec::with_capacity(self.num_generators());
        for d in &self.torsion {
            let d = d.to_u64().ok_or(GroupError::TooLarge)?;
            ranges.push((0..d).map(BigInt::from).collect());
        }
        let w = window as i64;
        for _ in 0..self.free_rank {
            ranges.push((-w..=w).map(BigInt::from).collect());
        }
        let mut out = Vec::new();
        let mut coords = Vec::new();
        build_lex(&ranges, &mut coords, &mut |c: &[BigInt]| {
            out.push(self.element(c.to_vec()));
        });
        Ok(out)
    }

    /// Exactly the invertible well-defined endomorphisms, each paired with
    /// its inverse, in a deterministic order. Finite groups only.
    pub fn enumerate_automorphisms(&self) -> Result<Vec<GroupAut>, GroupError> {
        if !self.is_finite() {
            return Err(GroupError::InfiniteGroup("automorphism enumeration"));
        }
        let elements = self.enumerate_elements()?;
        let order = self.order().expect("finite");
        // a generator of order d_i must map to an element of order exactly d_i
        let candidates: Vec<Vec<&GroupElement>> = self
            .torsion
            .iter()
            .map(|d| {
                elements
                    .iter()
                    .filter(|e| e.order().as_ref() == Some(d))
                    .collect()
            })
            .collect();
        let k = self.torsion.len();
        let mut auts = Vec::new();
        let mut pick = vec![0usize; k];
        'outer: loop {
            let matrix =
                IntMatrix::from_fn(k, k, |i, j| candidates[j][pick[j]].coords()[i].clone());
            if let Ok(hom) = GroupHom::new(self.clone(), self.clone(), matrix) {
                let image: BTreeSet<GroupElement> = elements.iter().map(|e| hom.apply(e)).collect();
                if BigInt::from(image.len()) == order {
                    auts.push(GroupAut::new(hom).expect("bijective endomorphism inverts"));
                }
            }
            // odometer over candidate picks, most significant first
            for j in (0..k).rev() {
                pick[j] += 1;
                if pick[j] < candidates[j].len() {
                    continue 'outer;
                }
                pick[j] = 0;
            }
            break;
        }
        Ok(auts)
    }
}

fn build_lex(ranges: &[Vec<BigInt>], prefix: &mut Vec<BigInt>, emit: &mut impl FnMut(&[BigInt])) {
    if prefix.len() == ranges.len() {
        emit(prefix);
        return;
    }
    for value in &ranges[prefix.len()] {
        prefix.push(value.clone());
        build_lex(ranges, prefix, emit);
        prefix.pop();
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "Z^0");
        }
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" x "))
    }
}

/// An element of a group, held as reduced coordinates: torsion coordinate
/// `i` lies in `[0, d_i)`, free coordinates are unrestricted.
///
/// The derived ordering (group, then coordinates lexicographically) is the
/// canonical element order used for pair keys.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupElement {
    group: FgAbelianGroup,
    coords: Vec<BigInt>,
}

impl GroupElement {
    pub fn new(group: FgAbelianGroup, mut coords: Vec<BigInt>) -> Self {
        assert_eq!(
            coords.len(),
            group.num_generators(),
            "coordinate count does not match the group rank"
        );
        for (c, d) in coords.iter_mut().zip(&group.torsion) {
            *c = c.mod_floor(d);
        }
        GroupElement { group, coords }
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Coordinate-wise sum. Panics if the groups differ.
    pub fn add(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(
            self.group, other.group,
            "group mismatch in element addition"
        );
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        GroupElement::new(self.group.clone(), coords)
    }

    pub fn neg(&self) -> GroupElement {
        let coords = self.coords.iter().map(|c| -c).collect();
        GroupElement::new(self.group.clone(), coords)
    }

    pub fn sub(&self, other: &GroupElement) -> GroupElement {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, k: &BigInt) -> GroupElement {
        let coords = self.coords.iter().map(|c| c * k).collect();
        GroupElement::new(self.group.clone(), coords)
    }

    /// Order of the element; `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        let k = self.group.torsion.len();
        if self.coords[k..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut ord = BigInt::one();
        for (c, d) in self.coords.iter().zip(&self.group.torsion) {
            ord = ord.lcm(&(d / c.gcd(d)));
        }
        Some(ord)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(BigInt::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A homomorphism between groups in canonical form, as the integer matrix
/// sending source generators to target coordinates (one column per source
/// generator).
///
/// Construction certifies well-definedness: the image of every source
/// relation `d_i e_i` must lie in the relation lattice of the target, which
/// is checked by solving against the target relation matrix.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: FgAbelianGroup,
    target: FgAbelianGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(
        source: FgAbelianGroup,
        target: FgAbelianGroup,
        matrix: IntMatrix,
    ) -> Result<Self, GroupError> {
        let want_rows = target.num_generators();
        let want_cols = source.num_generators();
        if matrix.rows() != want_rows || matrix.cols() != want_cols {
            return Err(GroupError::BadShape {
                got_rows: matrix.rows(),
                got_cols: matrix.cols(),
                want_rows,
                want_cols,
            });
        }
        let relations = target.relation_matrix();
        for (i, d) in source.torsion.iter().enumerate() {
            let image: Vec<BigInt> = matrix.column(i).iter().map(|c| c * d).collect();
            if intlin::solve(&relations, &image).is_none() {
                return Err(GroupError::NotWellDefined { index: i });
            }
        }
        Ok(GroupHom {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(group: &FgAbelianGroup) -> Self {
        let n = group.num_generators();
        GroupHom {
            source: group.clone(),
            target: group.clone(),
            matrix: IntMatrix::identity(n),
        }
    }

    pub fn source(&self) -> &FgAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        assert_eq!(
            *x.group(),
            self.source,
            "element is not in the source group"
        );
        self.target.element(self.matrix.mul_vec(x.coords()))
    }

    /// Composition `self . g` (apply `g` first). Errors when the middles differ.
    pub fn compose(&self, g: &GroupHom) -> Result<GroupHom, GroupError> {
        if g.target != self.source {
            return Err(GroupError::CompositionMismatch);
        }
        GroupHom::new(
            g.source.clone(),
            self.target.clone(),
            self.matrix.mul(&g.matrix),
        )
    }

    /// Matrix with torsion rows reduced into canonical range; two homs act
    /// identically iff their canonical matrices agree.
    pub fn canonical_matrix(&self) -> IntMatrix {
        let torsion = self.target.torsion();
        IntMatrix::from_fn(self.matrix.rows(), self.matrix.cols(), |i, j| {
            let e = &self.matrix[(i, j)];
            match torsion.get(i) {
                Some(d) => e.mod_floor(d),
                None => e.clone(),
            }
        })
    }

    pub fn same_action(&self, other: &GroupHom) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.canonical_matrix() == other.canonical_matrix()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.same_action(&GroupHom::identity(&self.source))
    }

    /// Compact row-by-row rendering of the canonical matrix, e.g. "0,1;1,0".
    pub fn brief(&self) -> String {
        let m = self.canonical_matrix();
        (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(BigInt::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Two-sided inverse, if this homomorphism is an isomorphism.
    ///
    /// For each target generator a preimage is found by solving against the
    /// matrix augmented with the target relations; the candidate is then
    /// certified and checked against the identity on both sides.
    pub fn invert(&self) -> Option<GroupHom> {
        let n_t = self.target.num_generators();
        let n_s = self.source.num_generators();
        let relations = self.target.relation_matrix();
        let augmented = IntMatrix::from_fn(n_t, n_s + relations.cols(), |i, j| {
            if j < n_s {
                self.matrix[(i, j)].clone()
            } else {
                relations[(i, j - n_s)].clone()
            }
        });
        let snf = intlin::smith_normal_form(&augmented);
        let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(n_t);
        for i in 0..n_t {
            let mut e = vec![BigInt::zero(); n_t];
            e[i] = BigInt::one();
            let solution = intlin::solve_with(&snf, &e)?;
            columns.push(solution[..n_s].to_vec());
        }
        let inverse_matrix = IntMatrix::from_fn(n_s, n_t, |i, j| columns[j][i].clone());
        let inverse =
            GroupHom::new(self.target.clone(), self.source.clone(), inverse_matrix).ok()?;
        let fg = self.compose(&inverse).ok()?;
        let gf = inverse.compose(self).ok()?;
        if fg.is_identity() && gf.is_identity() {
            Some(inverse)
        } else {
            None
        }
    }
}

impl PartialEq for GroupHom {
    fn eq(&self, other: &Self) -> bool {
        self.same_action(other)
    }
}

impl Eq for GroupHom {}

/// An automorphism: a homomorphism with `source = target`, paired with its
/// two-sided inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAut {
    hom: GroupHom,
    inverse: GroupHom,
}

impl GroupAut {
    pub fn new(hom: GroupHom) -> Result<Self, GroupError> {
        if hom.source != hom.target {
            return Err(GroupError::NotEndomorphism);
        }
        let inverse = hom.invert().ok_or(GroupError::NotInvertible)?;
        Ok(GroupAut { hom, inverse })
    }

    pub fn identity(group: &FgAbelianGroup) -> Self {
        let id = GroupHom::identity(group);
        GroupAut {
            hom: id.clone(),
            inverse: id,
        }
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.hom.source
    }

    pub fn hom(&self) -> &GroupHom {
        &self.hom
    }

    pub fn inverse(&self) -> &GroupHom {
        &self.inverse
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        self.hom.apply(x)
    }

    pub fn apply_inverse(&self, x: &GroupElement) -> GroupElement {
        self.inverse.apply(x)
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &GroupAut) -> Result<GroupAut, GroupError> {
        let hom = self.hom.compose(&other.hom)?;
        let inverse = other.inverse.compose(&self.inverse)?;
        Ok(GroupAut { hom, inverse })
    }
}

/// True iff the two canonical forms present isomorphic groups, i.e. are equal.
pub fn groups_isomorphic(a: &FgAbelianGroup, b: &FgAbelianGroup) -> bool {
    a == b
}

/// Parses the group-spec grammar:
///
/// ```text
/// spec := "0" | term ("x" term)*
/// term := "Z" | "Z^" nat | "Z/" nat(>= 2)
/// ```
///
/// Whitespace-insensitive. The result is re-canonicalized, so e.g.
/// "Z/4 x Z/2 x Z/3" yields torsion (2, 12).
pub fn parse_group_spec(text: &str) -> Result<FgAbelianGroup, GroupError> {
    Parser::new(text).parse()
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            _text: text,
        }
    }

    fn error(&self, pos: usize, msg: impl Into<String>) -> GroupError {
        GroupError::Parse {
            pos: pos + 1, // 1-based for humans
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<FgAbelianGroup, GroupError> {
        self.skip_ws();
        if self.peek() == Some('0') {
            self.pos += 1;
            self.skip_ws();
            if let Some(c) = self.peek() {
                return Err(self.error(self.pos, format!("unexpected {c:?} after \"0\"")));
            }
            return Ok(FgAbelianGroup::trivial());
        }
        let mut orders: Vec<BigInt> = Vec::new();
        let mut free_rank: usize = 0;
        loop {
            self.term(&mut orders, &mut free_rank)?;
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('x') => {
                    self.pos += 1;
                }
                Some(c) => {
                    return Err(self.error(self.pos, format!("expected \"x\" or end, found {c:?}")))
                }
            }
        }
        Ok(FgAbelianGroup::from_orders(&orders, free_rank))
    }

    fn term(&mut self, orders: &mut Vec<BigInt>, free_rank: &mut usize) -> Result<(), GroupError> {
        self.skip_ws();
        match self.peek() {
            Some('Z') => self.pos += 1,
            Some(c) => return Err(self.error(self.pos, format!("expected \"Z\", found {c:?}"))),
            None => return Err(self.error(self.pos, "expected a term")),
        }
        match self.peek() {
            Some('^') => {
                self.pos += 1;
                let (n, at) = self.nat()?;
                let n = n
                    .to_usize()
                    .ok_or_else(|| self.error(at, "free rank is too large"))?;
                *free_rank += n;
            }
            Some('/') => {
                self.pos += 1;
                let (d, at) = self.nat()?;
                if d < BigInt::from(2) {
                    return Err(self.error(
                        at,
                        format!("Z/{d} is not allowed; order must be at least 2"),
                    ));
                }
                orders.push(d);
            }
            _ => *free_rank += 1,
        }
        Ok(())
    }

    fn nat(&mut self) -> Result<(BigInt, usize), GroupError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error(start, "expected a number"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok((digits.parse().expect("digits form an integer"), start))
    }
}
