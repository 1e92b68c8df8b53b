//! Matrix systems over cone types and elementary multiplicative functions.
//!
//! A matrix system assigns a vector space dimension to each nonidentity
//! cone type and a linear map to each admissible transition; the generator
//! label is redundant because a transition pair determines its generator.
//! A multiplicative function pushes a vector from a cone anchor through the
//! system along successors. Three evaluation strategies are provided and
//! proved equal on random inputs: the literal recursion, the sum over
//! geodesics of block products, and the global block-matrix formula.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
pub use num_rational::BigRational;

use crate::alphabet::Generator;
use crate::cone::{ConeTypeId, ConeTypeTable};
use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::relator::RelatorTable;
use crate::rng::SplitMix64;
use crate::word::Word;

/// Scalar field for matrix systems: exact rationals for bit-exact tests,
/// floats for speed.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Result<Self>;
    /// Exact for rationals, tolerant for floats.
    fn approx_eq(&self, rhs: &Self) -> bool;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_json(&self) -> serde_json::Value {
        if num_traits::One::is_one(self.denom()) {
            serde_json::Value::String(self.numer().to_string())
        } else {
            serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }
    fn from_json(v: &serde_json::Value) -> Result<Self> {
        let parse_err = |t: &str| Error::InvalidSystem(format!("bad rational entry '{t}'"));
        match v {
            serde_json::Value::Number(n) => {
                let i = n.as_i64().ok_or_else(|| parse_err(&n.to_string()))?;
                Ok(Self::from_ratio(i, 1))
            }
            serde_json::Value::String(s) => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a, b),
                    None => (s.as_str(), "1"),
                };
                let num: BigInt = num.trim().parse().map_err(|_| parse_err(s))?;
                let den: BigInt = den.trim().parse().map_err(|_| parse_err(s))?;
                if num_traits::Zero::is_zero(&den) {
                    return Err(parse_err(s));
                }
                Ok(BigRational::new(num, den))
            }
            _ => Err(parse_err(&v.to_string())),
        }
    }
    fn approx_eq(&self, rhs: &Self) -> bool {
        self == rhs
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => {
                n.as_f64().ok_or_else(|| Error::InvalidSystem(format!("bad float entry '{n}'")))
            }
            serde_json::Value::String(s) => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a, b),
                    None => (s.as_str(), "1"),
                };
                let num: f64 = num.trim().parse().map_err(|_| {
                    Error::InvalidSystem(format!("bad float entry '{s}'"))
                })?;
                let den: f64 = den.trim().parse().map_err(|_| {
                    Error::InvalidSystem(format!("bad float entry '{s}'"))
                })?;
                Ok(num / den)
            }
            _ => Err(Error::InvalidSystem(format!("bad float entry '{v}'"))),
        }
    }
    fn approx_eq(&self, rhs: &Self) -> bool {
        (self - rhs).abs() <= 1e-9 * self.abs().max(rhs.abs()).max(1.0)
    }
}

/// Small dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidSystem("ragged matrix rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        debug_assert_eq!(v.len(), self.cols);
        let mut out = vec![S::zero(); self.rows];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.get(r, c);
                if !e.is_zero() && !v[c].is_zero() {
                    out[r].add_assign_ref(&e.mul_ref(&v[c]));
                }
            }
        }
        out
    }

    pub fn mul_mat(&self, rhs: &Mat<S>) -> Mat<S> {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut out: Mat<S> = Mat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let e = self.get(r, k);
                if e.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = e.mul_ref(rhs.get(k, c));
                    out.data[r * rhs.cols + c].add_assign_ref(&v);
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, rhs: &Mat<S>) {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            a.add_assign_ref(b);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }
}

/// The unique generator realizing each 1-entry of the successor matrix,
/// keyed by `(to, from)`. Errors if two generators realize one pair.
pub fn admissible_pairs(
    rt: &RelatorTable,
    table: &ConeTypeTable,
) -> Result<BTreeMap<(u16, u16), Generator>> {
    let mut out = BTreeMap::new();
    for c in 1..=table.count() as u16 {
        for a in rt.alphabet().generators() {
            if let Some(s) = table.successor(ConeTypeId(c), a) {
                if let Some(prev) = out.insert((s.get(), c), a) {
                    if prev != a {
                        return Err(Error::AmbiguousTransition(s.get(), c));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Per-length-class dimension profile for building systems.
#[derive(Debug, Clone, Copy)]
pub struct DimsProfile {
    pub singles: usize,
    pub doubles: usize,
    pub triples: usize,
    pub quadruples: usize,
}

impl DimsProfile {
    pub fn scalar() -> Self {
        DimsProfile { singles: 1, doubles: 1, triples: 1, quadruples: 1 }
    }

    fn dim_for_length(&self, len: usize) -> usize {
        match len {
            1 => self.singles,
            2 => self.doubles,
            3 => self.triples,
            _ => self.quadruples,
        }
    }

    fn validate(&self) -> Result<()> {
        if [self.singles, self.doubles, self.triples, self.quadruples].iter().any(|&d| d == 0) {
            return Err(Error::InvalidSystem("dimensions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Vector-space dimensions per cone type plus one linear map per admissible
/// transition.
#[derive(Debug, Clone)]
pub struct MatrixSystem<S> {
    dims: Vec<usize>,
    blocks: BTreeMap<(u16, u16), Mat<S>>,
}

impl<S: Scalar> MatrixSystem<S> {
    pub fn dim_of(&self, c: ConeTypeId) -> usize {
        self.dims[c.get() as usize - 1]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn block(&self, to: ConeTypeId, from: ConeTypeId) -> Option<&Mat<S>> {
        self.blocks.get(&(to.get(), from.get()))
    }

    pub fn blocks(&self) -> &BTreeMap<(u16, u16), Mat<S>> {
        &self.blocks
    }

    /// Override one block (keeps the admissible pattern).
    pub fn set_block(&mut self, to: ConeTypeId, from: ConeTypeId, m: Mat<S>) -> Result<()> {
        match self.blocks.get_mut(&(to.get(), from.get())) {
            Some(slot) if slot.rows == m.rows && slot.cols == m.cols => {
                *slot = m;
                Ok(())
            }
            Some(slot) => Err(Error::DimensionMismatch { expected: slot.rows * slot.cols, got: m.rows * m.cols }),
            None => Err(Error::InvalidSystem("block is not admissible".into())),
        }
    }

    /// Reproducible system with nonzero small-rational entries everywhere.
    pub fn random(
        rt: &RelatorTable,
        table: &ConeTypeTable,
        profile: &DimsProfile,
        seed: u64,
    ) -> Result<Self> {
        profile.validate()?;
        let dims: Vec<usize> =
            (1..=table.count() as u16).map(|c| profile.dim_for_length(table.length_of(ConeTypeId(c)))).collect();
        let mut rng = SplitMix64::new(seed);
        let mut blocks = BTreeMap::new();
        for &(to, from) in admissible_pairs(rt, table)?.keys() {
            let (r, c) = (dims[to as usize - 1], dims[from as usize - 1]);
            let mut m = Mat::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    let mut num = rng.in_range(-4, 4);
                    if num == 0 {
                        num = 1;
                    }
                    let den = rng.in_range(1, 4);
                    m.set(i, j, S::from_ratio(num, den));
                }
            }
            blocks.insert((to, from), m);
        }
        Ok(MatrixSystem { dims, blocks })
    }

    /// Scalar system with every admissible map equal to 1. Evaluating it
    /// counts geodesics.
    pub fn all_ones_scalar(rt: &RelatorTable, table: &ConeTypeTable) -> Result<Self> {
        let dims = vec![1usize; table.count()];
        let mut blocks = BTreeMap::new();
        for &(to, from) in admissible_pairs(rt, table)?.keys() {
            let mut m = Mat::zeros(1, 1);
            m.set(0, 0, S::one());
            blocks.insert((to, from), m);
        }
        Ok(MatrixSystem { dims, blocks })
    }

    /// Check the block pattern against the admissible pairs of the table.
    pub fn validate(&self, rt: &RelatorTable, table: &ConeTypeTable) -> Result<()> {
        if self.dims.len() != table.count() {
            return Err(Error::DimensionMismatch { expected: table.count(), got: self.dims.len() });
        }
        if self.dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidSystem("dimensions must be at least 1".into()));
        }
        let admissible = admissible_pairs(rt, table)?;
        for key in self.blocks.keys() {
            if !admissible.contains_key(key) {
                return Err(Error::InvalidSystem(format!(
                    "block ({}, {}) is not an admissible transition",
                    key.0, key.1
                )));
            }
        }
        for key in admissible.keys() {
            let b = self.blocks.get(key).ok_or_else(|| {
                Error::InvalidSystem(format!("missing block ({}, {})", key.0, key.1))
            })?;
            let expect = (self.dims[key.0 as usize - 1], self.dims[key.1 as usize - 1]);
            if (b.rows, b.cols) != expect {
                return Err(Error::DimensionMismatch { expected: expect.0 * expect.1, got: b.rows * b.cols });
            }
        }
        Ok(())
    }

    /// Schema: `{dims: {id: d}, blocks: [{from, to, entries: row-major}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let dims: serde_json::Map<String, serde_json::Value> = self
            .dims
            .iter()
            .enumerate()
            .map(|(i, &d)| ((i + 1).to_string(), serde_json::json!(d)))
            .collect();
        let blocks: Vec<serde_json::Value> = self
            .blocks
            .iter()
            .map(|(&(to, from), m)| {
                serde_json::json!({
                    "from": from,
                    "to": to,
                    "entries": m.entries().iter().map(S::to_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "dims": dims, "blocks": blocks })
    }

    pub fn from_json(v: &serde_json::Value, rt: &RelatorTable, table: &ConeTypeTable) -> Result<Self> {
        let dims_obj = v["dims"]
            .as_object()
            .ok_or_else(|| Error::InvalidSystem("missing 'dims' object".into()))?;
        let mut dims = vec![0usize; table.count()];
        for (k, d) in dims_obj {
            let id: usize = k
                .parse()
                .ok()
                .filter(|&i| (1..=table.count()).contains(&i))
                .ok_or_else(|| Error::InvalidSystem(format!("bad type id '{k}'")))?;
            dims[id - 1] = d
                .as_u64()
                .filter(|&d| d >= 1)
                .ok_or_else(|| Error::InvalidSystem(format!("bad dimension for type {k}")))?
                as usize;
        }
        let blocks_arr = v["blocks"]
            .as_array()
            .ok_or_else(|| Error::InvalidSystem("missing 'blocks' array".into()))?;
        let mut blocks = BTreeMap::new();
        for b in blocks_arr {
            let from = b["from"].as_u64().ok_or_else(|| Error::InvalidSystem("block missing 'from'".into()))? as u16;
            let to = b["to"].as_u64().ok_or_else(|| Error::InvalidSystem("block missing 'to'".into()))? as u16;
            let entries = b["entries"]
                .as_array()
                .ok_or_else(|| Error::InvalidSystem("block missing 'entries'".into()))?;
            let (r, c) = (
                *dims.get(to as usize - 1).unwrap_or(&0),
                *dims.get(from as usize - 1).unwrap_or(&0),
            );
            if entries.len() != r * c {
                return Err(Error::DimensionMismatch { expected: r * c, got: entries.len() });
            }
            let mut m = Mat::zeros(r, c);
            for (i, e) in entries.iter().enumerate() {
                m.data[i] = S::from_json(e)?;
            }
            blocks.insert((to, from), m);
        }
        let sys = MatrixSystem { dims, blocks };
        sys.validate(rt, table)?;
        Ok(sys)
    }
}

/// An elementary multiplicative function: a cone `C(x, y)` together with a
/// vector in the space of the anchor's cone type.
#[derive(Debug, Clone)]
pub struct MultFunc<S> {
    x: GroupElement,
    y: GroupElement,
    anchor_type: ConeTypeId,
    vector: Vec<S>,
}

impl<S: Scalar> MultFunc<S> {
    pub fn new(
        rt: &RelatorTable,
        table: &ConeTypeTable,
        sys: &MatrixSystem<S>,
        x: GroupElement,
        y: GroupElement,
        vector: Vec<S>,
    ) -> Result<Self> {
        if rt.distance(&x, &y) == 0 {
            return Err(Error::InvalidSystem("cone base needs d(x, y) >= 1".into()));
        }
        let anchor = rt.multiply(&rt.invert(&x), &y);
        let anchor_type = table.classify(&anchor)?;
        let expected = sys.dim_of(anchor_type);
        if vector.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: vector.len() });
        }
        Ok(MultFunc { x, y, anchor_type, vector })
    }

    pub fn base(&self) -> (&GroupElement, &GroupElement) {
        (&self.x, &self.y)
    }

    pub fn anchor_type(&self) -> ConeTypeId {
        self.anchor_type
    }

    pub fn vector(&self) -> &[S] {
        &self.vector
    }

    /// Left translation: `C(x, y)` becomes `C(gx, gy)` with the same vector.
    pub fn translate(&self, rt: &RelatorTable, g: &GroupElement) -> MultFunc<S> {
        MultFunc {
            x: rt.multiply(g, &self.x),
            y: rt.multiply(g, &self.y),
            anchor_type: self.anchor_type,
            vector: self.vector.clone(),
        }
    }
}

/// Shared context for the three evaluation strategies.
pub struct Evaluator<'a, S> {
    rt: &'a RelatorTable,
    table: &'a ConeTypeTable,
    sys: &'a MatrixSystem<S>,
}

impl<'a, S: Scalar> Evaluator<'a, S> {
    pub fn new(rt: &'a RelatorTable, table: &'a ConeTypeTable, sys: &'a MatrixSystem<S>) -> Self {
        Evaluator { rt, table, sys }
    }

    /// Whether `w` lies in the cone set of type `c`, tested against the
    /// representative.
    fn in_cone_of_type(&self, c: ConeTypeId, w: &GroupElement) -> bool {
        let rep = self.table.representative(c).expect("nonidentity type");
        self.rt.element_length(&rep.concat(w.word())) == rep.len() + w.len()
    }

    /// Dimension of the value space at `z` (0 when `z = x`).
    fn value_dim(&self, f: &MultFunc<S>, z: &GroupElement) -> Result<usize> {
        let xz = self.rt.multiply(&self.rt.invert(&f.x), z);
        let c = self.table.classify(&xz)?;
        Ok(if c.get() == 0 { 0 } else { self.sys.dim_of(c) })
    }

    fn relative_to_anchor(&self, f: &MultFunc<S>, z: &GroupElement) -> GroupElement {
        self.rt.multiply(&self.rt.invert(&f.y), z)
    }

    /// Literal recursive evaluation with memoization on the current anchor
    /// and target. The recursion is evaluated on linear maps so one memo
    /// entry serves every vector pushed through the same anchor; anchors are
    /// keyed by cone type and relative target, which is justified by
    /// translation invariance and asserted against an anchor-keyed
    /// evaluation in the tests.
    pub fn recursive(&self, f: &MultFunc<S>, z: &GroupElement) -> Result<Vec<S>> {
        let rel = self.relative_to_anchor(f, z);
        let out_dim = self.value_dim(f, z)?;
        let mut memo: HashMap<(u16, Word), Mat<S>> = HashMap::new();
        let t = self.transfer(f.anchor_type, &rel, out_dim, &mut memo);
        Ok(t.mul_vec(&f.vector))
    }

    /// Sum over successor branches of the transfer maps `V_c -> V_(type of z)`.
    fn transfer(
        &self,
        c: ConeTypeId,
        rel: &GroupElement,
        out_dim: usize,
        memo: &mut HashMap<(u16, Word), Mat<S>>,
    ) -> Mat<S> {
        if rel.is_identity() {
            return Mat::identity(self.sys.dim_of(c));
        }
        let key = (c.get(), rel.word().clone());
        if let Some(m) = memo.get(&key) {
            return m.clone();
        }
        let dim_c = self.sys.dim_of(c);
        let result = if !self.in_cone_of_type(c, rel) {
            Mat::zeros(out_dim, dim_c)
        } else {
            let mut acc = Mat::zeros(out_dim, dim_c);
            for a in self.rt.alphabet().generators() {
                if let Some(c_next) = self.table.successor(c, a) {
                    let step = GroupElement::from_canonical(Word::single(
                        self.rt.alphabet().inverse_rank(a.0),
                    ));
                    let rel_next = self.rt.multiply(&step, rel);
                    let child = self.transfer(c_next, &rel_next, out_dim, memo);
                    if !child.is_zero() {
                        let h = self.sys.block(c_next, c).expect("admissible transition");
                        acc.add_assign(&child.mul_mat(h));
                    }
                }
            }
            acc
        };
        memo.insert(key, result.clone());
        result
    }

    /// Cone-type path along a geodesic word, starting at `c0`.
    fn type_path(&self, c0: ConeTypeId, w: &Word) -> Vec<ConeTypeId> {
        let mut path = vec![c0];
        let mut c = c0;
        for &a in w.letters() {
            c = self
                .table
                .successor(c, Generator(a))
                .expect("geodesic words inside a cone follow admissible edges");
            path.push(c);
        }
        path
    }

    /// Sum over all geodesic words from `y` to `z` of the right-to-left
    /// product of transition blocks.
    pub fn geodesic_sum(&self, f: &MultFunc<S>, z: &GroupElement) -> Result<Vec<S>> {
        let rel = self.relative_to_anchor(f, z);
        if rel.is_identity() {
            return Ok(f.vector.clone());
        }
        if !self.in_cone_of_type(f.anchor_type, &rel) {
            return Ok(vec![S::zero(); self.value_dim(f, z)?]);
        }
        let words = self.rt.geodesic_class(rel.word())?;
        let mut acc: Option<Vec<S>> = None;
        for w in words {
            let path = self.type_path(f.anchor_type, &w);
            let mut v = f.vector.clone();
            for j in 1..path.len() {
                let h = self.sys.block(path[j], path[j - 1]).expect("admissible transition");
                v = h.mul_vec(&v);
            }
            match &mut acc {
                None => acc = Some(v),
                Some(total) => {
                    for (t, x) in total.iter_mut().zip(&v) {
                        t.add_assign_ref(x);
                    }
                }
            }
        }
        Ok(acc.expect("a geodesic word exists"))
    }

    /// Block layout of the total space: offsets per type and its dimension.
    fn layout(&self) -> (Vec<usize>, usize) {
        let mut offsets = Vec::with_capacity(self.sys.dims().len() + 1);
        let mut total = 0;
        for &d in self.sys.dims() {
            offsets.push(total);
            total += d;
        }
        offsets.push(total);
        (offsets, total)
    }

    /// Apply the global block operator to a total-space vector.
    fn apply_global(&self, offsets: &[usize], v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); v.len()];
        for (&(to, from), h) in self.sys.blocks() {
            let src = &v[offsets[from as usize - 1]..offsets[from as usize - 1] + h.cols()];
            if src.iter().all(S::is_zero) {
                continue;
            }
            let dst_base = offsets[to as usize - 1];
            let piece = h.mul_vec(src);
            for (i, p) in piece.into_iter().enumerate() {
                out[dst_base + i].add_assign_ref(&p);
            }
        }
        out
    }

    fn project(offsets: &[usize], dim: usize, c: ConeTypeId, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); v.len()];
        let base = offsets[c.get() as usize - 1];
        out[base..base + dim].clone_from_slice(&v[base..base + dim]);
        out
    }

    /// Global block-matrix evaluation: embed the vector at the anchor type,
    /// apply the global operator, push it through the projector chain of
    /// each geodesic word, sum, apply the operator once more, and read off
    /// the block of the final type.
    pub fn matrix_form(&self, f: &MultFunc<S>, z: &GroupElement) -> Result<Vec<S>> {
        let rel = self.relative_to_anchor(f, z);
        if rel.is_identity() {
            return Ok(f.vector.clone());
        }
        if !self.in_cone_of_type(f.anchor_type, &rel) {
            return Ok(vec![S::zero(); self.value_dim(f, z)?]);
        }
        let (offsets, total) = self.layout();
        let c0 = f.anchor_type;
        let mut embedded = vec![S::zero(); total];
        let base = offsets[c0.get() as usize - 1];
        embedded[base..base + f.vector.len()].clone_from_slice(&f.vector);
        let after_first = self.apply_global(&offsets, &embedded);

        let words = self.rt.geodesic_class(rel.word())?;
        let n = rel.len();
        let c_final = self.type_path(c0, &words[0]).last().copied().expect("nonempty path");
        let final_base = offsets[c_final.get() as usize - 1];
        let final_dim = self.sys.dim_of(c_final);
        if n == 1 {
            return Ok(after_first[final_base..final_base + final_dim].to_vec());
        }
        let mut bracket_sum = vec![S::zero(); total];
        for w in words {
            let path = self.type_path(c0, &w);
            debug_assert_eq!(*path.last().expect("nonempty"), c_final);
            let mut v = Self::project(&offsets, self.sys.dim_of(path[1]), path[1], &after_first);
            for cj in path.iter().take(n).skip(2) {
                v = self.apply_global(&offsets, &v);
                v = Self::project(&offsets, self.sys.dim_of(*cj), *cj, &v);
            }
            for (t, x) in bracket_sum.iter_mut().zip(&v) {
                t.add_assign_ref(x);
            }
        }
        let last = self.apply_global(&offsets, &bracket_sum);
        Ok(last[final_base..final_base + final_dim].to_vec())
    }

    /// Dense projector onto the block of type `c` (test and inspection
    /// helper for the projector algebra).
    pub fn dense_projector(&self, c: ConeTypeId) -> Mat<S> {
        let (offsets, total) = self.layout();
        let mut m = Mat::zeros(total, total);
        let base = offsets[c.get() as usize - 1];
        for i in 0..self.sys.dim_of(c) {
            m.set(base + i, base + i, S::one());
        }
        m
    }
}
