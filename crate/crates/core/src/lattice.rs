//! Exact evaluation of `Z_n` on the `n x n` lattice with domain-wall
//! boundary conditions.
//!
//! Two independent routes are provided: a depth-first enumeration of all
//! arrow configurations ([`enumerate_dfs`]) and a row transfer-matrix
//! dynamic program over the `2^n` vertical-edge states ([`transfer_matrix_zn`]).
//!
//! Layout: vertex `(i, j)` sits in row `i` (top to bottom) and column `j`.
//! `h_edges[i][j]` is the horizontal edge left of vertex `(i, j)`, so
//! `h_edges[i][n]` is the right boundary. `v_edges[i][j]` is the vertical
//! edge above vertex `(i, j)`, so `v_edges[0]` is the top boundary and
//! `v_edges[n]` the bottom boundary. Under DWBC the top boundary points
//! down, the bottom boundary up, the left boundary left and the right
//! boundary right.

use std::collections::BTreeMap;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::Weights;
use crate::scalar::Scalar;

pub const MAX_DFS_SIZE: usize = 7;
pub const MAX_TRANSFER_SIZE: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HEdge {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VEdge {
    Up,
    Down,
}

/// The six ice-rule vertices, labelled by their incoming arrows:
/// 1 left+bottom, 2 right+top, 3 left+top, 4 right+bottom,
/// 5 top+bottom, 6 left+right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexType {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
}

/// Which of the weights `a`, `b`, `c` a vertex carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightClass {
    A,
    B,
    C,
}

impl VertexType {
    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based label.
    pub fn label(self) -> u8 {
        self as u8 + 1
    }

    pub fn weight_class(self) -> WeightClass {
        match self {
            VertexType::T1 | VertexType::T2 => WeightClass::A,
            VertexType::T3 | VertexType::T4 => WeightClass::B,
            VertexType::T5 | VertexType::T6 => WeightClass::C,
        }
    }
}

/// Classifies the vertex with the given incident edges, or `None` when the
/// ice rule is violated.
pub fn vertex_type(left: HEdge, right: HEdge, bottom: VEdge, top: VEdge) -> Option<VertexType> {
    use HEdge::{Left as L, Right as R};
    use VEdge::{Down as D, Up as U};
    match (left, right, bottom, top) {
        (R, R, U, U) => Some(VertexType::T1),
        (L, L, D, D) => Some(VertexType::T2),
        (R, R, D, D) => Some(VertexType::T3),
        (L, L, U, U) => Some(VertexType::T4),
        (L, R, U, D) => Some(VertexType::T5),
        (R, L, D, U) => Some(VertexType::T6),
        _ => None,
    }
}

/// Per-type vertex tallies `N1..N6`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexCounts(pub [u32; 6]);

impl VertexCounts {
    pub fn get(&self, t: VertexType) -> u32 {
        self.0[t.index()]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `(N1 + N2, N3 + N4, N5 + N6)`.
    pub fn class_totals(&self) -> (u32, u32, u32) {
        let c = &self.0;
        (c[0] + c[1], c[2] + c[3], c[4] + c[5])
    }

    /// The DWBC conservation laws `N1 = N2`, `N3 = N4`, `N5 = N6 + n`
    /// and `sum = n^2`.
    pub fn satisfies_dwbc(&self, n: usize) -> bool {
        let c = &self.0;
        let n = n as u32;
        c[0] == c[1] && c[2] == c[3] && c[4] == c[5] + n && self.total() == n * n
    }
}

/// A full arrow assignment on the `n x n` lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConfiguration", into = "RawConfiguration")]
pub struct Configuration {
    n: usize,
    h_edges: Vec<Vec<HEdge>>,
    v_edges: Vec<Vec<VEdge>>,
}

impl Configuration {
    /// Builds and validates a configuration (shape, ice rule, DWBC).
    pub fn new(n: usize, h_edges: Vec<Vec<HEdge>>, v_edges: Vec<Vec<VEdge>>) -> Result<Self> {
        let cfg = Configuration { n, h_edges, v_edges };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_edges(&self) -> &[Vec<HEdge>] {
        &self.h_edges
    }

    pub fn v_edges(&self) -> &[Vec<VEdge>] {
        &self.v_edges
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidConfiguration("n must be at least 1".into()));
        }
        if self.h_edges.len() != n || self.h_edges.iter().any(|row| row.len() != n + 1) {
            return Err(Error::InvalidConfiguration(format!("h_edges must be {n} x {}", n + 1)));
        }
        if self.v_edges.len() != n + 1 || self.v_edges.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidConfiguration(format!("v_edges must be {} x {n}", n + 1)));
        }
        for (i, row) in self.h_edges.iter().enumerate() {
            if row[0] != HEdge::Left || row[n] != HEdge::Right {
                return Err(Error::InvalidConfiguration(format!("row {i} violates the left/right boundary")));
            }
        }
        if self.v_edges[0].iter().any(|&e| e != VEdge::Down) {
            return Err(Error::InvalidConfiguration("top boundary must point down".into()));
        }
        if self.v_edges[n].iter().any(|&e| e != VEdge::Up) {
            return Err(Error::InvalidConfiguration("bottom boundary must point up".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if self.vertex(i, j).is_none() {
                    return Err(Error::InvalidConfiguration(format!("ice rule violated at vertex ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    /// Type of vertex `(i, j)`.
    pub fn vertex(&self, i: usize, j: usize) -> Option<VertexType> {
        vertex_type(self.h_edges[i][j], self.h_edges[i][j + 1], self.v_edges[i + 1][j], self.v_edges[i][j])
    }

    pub fn vertex_counts(&self) -> VertexCounts {
        vertex_counts_unchecked(self)
    }

    /// `w(sigma) = a^(N1+N2) b^(N3+N4) c^(N5+N6)`.
    pub fn weight<T: Scalar>(&self, w: &Weights<T>) -> T {
        let (na, nb, nc) = self.vertex_counts().class_totals();
        monomial(w, na, nb, nc)
    }
}

/// Vertex tallies of a configuration, re-checking the ice rule.
pub fn vertex_counts(cfg: &Configuration) -> Result<VertexCounts> {
    let mut counts = VertexCounts::default();
    for i in 0..cfg.n {
        for j in 0..cfg.n {
            let t = cfg
                .vertex(i, j)
                .ok_or_else(|| Error::InvalidConfiguration(format!("ice rule violated at vertex ({i}, {j})")))?;
            counts.0[t.index()] += 1;
        }
    }
    Ok(counts)
}

fn vertex_counts_unchecked(cfg: &Configuration) -> VertexCounts {
    vertex_counts(cfg).expect("configurations are validated on construction")
}

/// Gibbs probability `w(sigma) / Z_n`.
pub fn gibbs_probability<T: Scalar>(cfg: &Configuration, w: &Weights<T>, z: &T) -> T {
    cfg.weight(w).div_ref(z)
}

/// JSON form: `{n, h_edges, v_edges}` with `1` = Right/Up and `0` = Left/Down.
#[derive(Serialize, Deserialize)]
struct RawConfiguration {
    n: usize,
    h_edges: Vec<Vec<u8>>,
    v_edges: Vec<Vec<u8>>,
}

impl From<Configuration> for RawConfiguration {
    fn from(cfg: Configuration) -> Self {
        RawConfiguration {
            n: cfg.n,
            h_edges: cfg
                .h_edges
                .iter()
                .map(|row| row.iter().map(|&e| u8::from(e == HEdge::Right)).collect())
                .collect(),
            v_edges: cfg
                .v_edges
                .iter()
                .map(|row| row.iter().map(|&e| u8::from(e == VEdge::Up)).collect())
                .collect(),
        }
    }
}

impl TryFrom<RawConfiguration> for Configuration {
    type Error = Error;

    fn try_from(raw: RawConfiguration) -> Result<Self> {
        let bit = |b: u8| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::InvalidConfiguration(format!("edge value must be 0 or 1, got {other}"))),
        };
        let h_edges = raw
            .h_edges
            .iter()
            .map(|row| row.iter().map(|&b| bit(b).map(|r| if r { HEdge::Right } else { HEdge::Left })).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let v_edges = raw
            .v_edges
            .iter()
            .map(|row| row.iter().map(|&b| bit(b).map(|u| if u { VEdge::Up } else { VEdge::Down })).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Configuration::new(raw.n, h_edges, v_edges)
    }
}

fn monomial<T: Scalar>(w: &Weights<T>, na: u32, nb: u32, nc: u32) -> T {
    w.a().pow_u32(na).mul_ref(&w.b().pow_u32(nb)).mul_ref(&w.c().pow_u32(nc))
}

fn check_dfs_guard(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DFS_SIZE {
        return Err(Error::Guard(format!(
            "enumeration supports 1 <= n <= {MAX_DFS_SIZE}, got n = {n}; use the transfer matrix for larger n"
        )));
    }
    Ok(())
}

struct DfsState {
    n: usize,
    h: Vec<Vec<HEdge>>,
    v: Vec<Vec<VEdge>>,
    counts: VertexCounts,
}

impl DfsState {
    fn new(n: usize) -> Self {
        let mut h = vec![vec![HEdge::Left; n + 1]; n];
        for row in &mut h {
            row[n] = HEdge::Right;
        }
        let mut v = vec![vec![VEdge::Down; n]; n + 1];
        v[n] = vec![VEdge::Up; n];
        DfsState { n, h, v, counts: VertexCounts::default() }
    }

    /// Row-major traversal: the left and top edges of vertex `k` are known,
    /// its right and bottom edges are chosen here.
    fn descend(&mut self, k: usize, visit: &mut impl FnMut(&DfsState)) {
        let n = self.n;
        if k == n * n {
            visit(self);
            return;
        }
        let (i, j) = (k / n, k % n);
        let left = self.h[i][j];
        let top = self.v[i][j];
        let rights: &[HEdge] = if j + 1 == n { &[HEdge::Right] } else { &[HEdge::Left, HEdge::Right] };
        let bottoms: &[VEdge] = if i + 1 == n { &[VEdge::Up] } else { &[VEdge::Up, VEdge::Down] };
        for &right in rights {
            for &bottom in bottoms {
                if let Some(t) = vertex_type(left, right, bottom, top) {
                    self.h[i][j + 1] = right;
                    self.v[i + 1][j] = bottom;
                    self.counts.0[t.index()] += 1;
                    self.descend(k + 1, visit);
                    self.counts.0[t.index()] -= 1;
                }
            }
        }
    }
}

/// Calls `f` once for every DWBC configuration of size `n`.
pub fn for_each_configuration(n: usize, mut f: impl FnMut(&Configuration, &VertexCounts)) -> Result<()> {
    check_dfs_guard(n)?;
    DfsState::new(n).descend(0, &mut |state: &DfsState| {
        let cfg = Configuration { n: state.n, h_edges: state.h.clone(), v_edges: state.v.clone() };
        f(&cfg, &state.counts);
    });
    Ok(())
}

pub fn enumerate_configurations(n: usize) -> Result<Vec<Configuration>> {
    let mut out = Vec::new();
    for_each_configuration(n, |cfg, _| out.push(cfg.clone()))?;
    Ok(out)
}

/// Multiplicities of the monomials `a^i b^j c^k` over all configurations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightEnumerator {
    pub n: usize,
    pub terms: BTreeMap<(u32, u32, u32), u64>,
}

impl WeightEnumerator {
    pub fn configuration_count(&self) -> u64 {
        self.terms.values().sum()
    }

    pub fn evaluate<T: Scalar>(&self, w: &Weights<T>) -> T {
        let mut z = w.a().zero_like();
        for (&(na, nb, nc), &mult) in &self.terms {
            let term = monomial(w, na, nb, nc).mul_ref(&w.a().integer_like(&Integer::from(mult)));
            z.add_assign_ref(&term);
        }
        z
    }
}

pub fn weight_enumerator(n: usize) -> Result<WeightEnumerator> {
    check_dfs_guard(n)?;
    let mut terms = BTreeMap::new();
    DfsState::new(n).descend(0, &mut |state: &DfsState| {
        *terms.entry(state.counts.class_totals()).or_insert(0u64) += 1;
    });
    Ok(WeightEnumerator { n, terms })
}

/// `Z_n` and the number of configurations, by exhaustive enumeration.
pub fn enumerate_dfs<T: Scalar>(n: usize, w: &Weights<T>) -> Result<(T, u64)> {
    let poly = weight_enumerator(n)?;
    Ok((poly.evaluate(w), poly.configuration_count()))
}

pub fn transfer_matrix_zn<T: Scalar>(n: usize, w: &Weights<T>) -> Result<T> {
    transfer_matrix_zn_with(n, w, Execution::default())
}

/// `Z_n` by a vertex-by-vertex transfer matrix, scanning rows bottom to top.
///
/// The state is the mask of the `n` vertical edges crossing the current
/// cut (bit set = Up) plus the horizontal edge entering the next vertex.
/// Each step pulls from at most four predecessor states, so targets update
/// independently.
pub fn transfer_matrix_zn_with<T: Scalar>(n: usize, w: &Weights<T>, exec: Execution) -> Result<T> {
    if n == 0 || n > MAX_TRANSFER_SIZE {
        return Err(Error::Guard(format!("transfer matrix supports 1 <= n <= {MAX_TRANSFER_SIZE}, got n = {n}")));
    }
    let class_weight = |t: VertexType| match t.weight_class() {
        WeightClass::A => w.a(),
        WeightClass::B => w.b(),
        WeightClass::C => w.c(),
    };
    let states = 1usize << (n + 1);
    let index = |mask: usize, h: HEdge| (mask << 1) | usize::from(h == HEdge::Right);
    let full = (1usize << n) - 1;

    let mut current: Vec<Option<T>> = vec![None; states];
    current[index(full, HEdge::Left)] = Some(w.a().one_like());

    for _row in 0..n {
        for j in 0..n {
            let bit = 1usize << j;
            current = exec.map_range(0..states, |target| {
                let new_mask = target >> 1;
                let right = if target & 1 == 1 { HEdge::Right } else { HEdge::Left };
                let top = if new_mask & bit != 0 { VEdge::Up } else { VEdge::Down };
                let mut acc: Option<T> = None;
                for bottom in [VEdge::Up, VEdge::Down] {
                    let old_mask = if bottom == VEdge::Up { new_mask | bit } else { new_mask & !bit };
                    for left in [HEdge::Left, HEdge::Right] {
                        let Some(prev) = &current[index(old_mask, left)] else { continue };
                        let Some(t) = vertex_type(left, right, bottom, top) else { continue };
                        let term = prev.mul_ref(class_weight(t));
                        match &mut acc {
                            Some(sum) => sum.add_assign_ref(&term),
                            None => acc = Some(term),
                        }
                    }
                }
                acc
            });
        }
        // The row must exit through the right boundary pointing right; the
        // next row enters from the left boundary pointing left.
        let mut next: Vec<Option<T>> = vec![None; states];
        for mask in 0..=full {
            next[index(mask, HEdge::Left)] = current[index(mask, HEdge::Right)].take();
        }
        current = next;
    }
    Ok(current[index(0, HEdge::Left)].take().unwrap_or_else(|| w.a().zero_like()))
}
