//! Combinatorial unpunctured triangulated surfaces.
//!
//! A triangulation is a list of triangles, each holding its three side labels
//! in the cyclic order induced by the surface orientation. Internal arcs are
//! labeled `0..n`, boundary segments `n..n+b`; boundary segments are frozen
//! vertices when the exchange matrix is extended to full rank.
//!
//! The orientation convention is pinned once and tested: a triangle with ccw
//! sides `(s0, s1, s2)` contributes the quiver arrows `s0→s1→s2→s0`, and the
//! exchange matrix is `b[i][j] = #(j→i) − #(i→j)`, so that the in-neighbors of
//! an arc `k` carry `b_{k,·} = +1` and the out-neighbors `−1`.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

pub type Side = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("chord ({0},{1}) is not a valid diagonal")]
    InvalidChord(usize, usize),
    #[error("chords ({0},{1}) and ({2},{3}) cross")]
    CrossingChords(usize, usize, usize, usize),
    #[error("diagonal set is not maximal: expected {expected}, got {got}")]
    NotMaximal { expected: usize, got: usize },
    #[error("side {side} lies in {got} triangle slots, expected {want}")]
    BadIncidence { side: Side, got: usize, want: usize },
    #[error("triangle {0} repeats a side (self-folded triangles are excluded)")]
    SelfFolded(usize),
    #[error("the torus with one marked point is excluded")]
    TorusOnePointExcluded,
    #[error("arc {0} is not an internal arc")]
    NotInternal(Side),
    #[error("flip path search exhausted the node budget {0}")]
    SearchExhausted(usize),
}

/// Coincidences among the four local neighbors of an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coincidence {
    None,
    /// `τ_{k−1} = τ_{k+1}`: the two in-neighbors are the same arc.
    InNeighbors,
    /// `τ_{k−2} = τ_{k+2}`: the two out-neighbors are the same arc.
    OutNeighbors,
}

/// The two triangles around an internal arc `k` with their neighbor roles.
///
/// In triangle `a` the arrows are `l1 → k → m1`, in triangle `b` they are
/// `l2 → k → m2`. Neighbors may be boundary segments (frozen).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalConfig {
    pub k: Side,
    pub tri_a: usize,
    pub tri_b: usize,
    pub l1: Side,
    pub m1: Side,
    pub l2: Side,
    pub m2: Side,
    pub coincidence: Coincidence,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Triangulation {
    n_internal: usize,
    n_boundary: usize,
    triangles: Vec<[Side; 3]>,
}

impl Triangulation {
    pub fn new(
        n_internal: usize,
        n_boundary: usize,
        triangles: Vec<[Side; 3]>,
    ) -> Result<Self, SurfaceError> {
        // normalized storage: minimal rotation per triangle, sorted list, so
        // that equal triangulations are identical instances and arrow ids of
        // their quivers agree
        let mut triangles: Vec<[Side; 3]> = triangles.into_iter().map(min_rotation).collect();
        triangles.sort();
        let t = Triangulation {
            n_internal,
            n_boundary,
            triangles,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<(), SurfaceError> {
        let m = self.m();
        let mut count = vec![0usize; m];
        for (i, tri) in self.triangles.iter().enumerate() {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(SurfaceError::SelfFolded(i));
            }
            for &s in tri {
                if s >= m {
                    return Err(SurfaceError::BadIncidence {
                        side: s,
                        got: 0,
                        want: 0,
                    });
                }
                count[s] += 1;
            }
        }
        for s in 0..m {
            let want = if s < self.n_internal { 2 } else { 1 };
            if count[s] != want {
                return Err(SurfaceError::BadIncidence {
                    side: s,
                    got: count[s],
                    want,
                });
            }
        }
        for k in 0..self.n_internal {
            let lc = self.local_config(k)?;
            // both coincidences at once only happens on the torus with one
            // marked point; local_config reports it
            let _ = lc;
        }
        Ok(())
    }

    pub fn n_internal(&self) -> usize {
        self.n_internal
    }

    pub fn n_boundary(&self) -> usize {
        self.n_boundary
    }

    /// Total number of side labels (ambient rank of the extended lattice).
    pub fn m(&self) -> usize {
        self.n_internal + self.n_boundary
    }

    pub fn triangles(&self) -> &[[Side; 3]] {
        &self.triangles
    }

    pub fn is_internal(&self, s: Side) -> bool {
        s < self.n_internal
    }

    pub fn triangles_of(&self, s: Side) -> Vec<usize> {
        self.triangles
            .iter()
            .enumerate()
            .filter(|(_, tri)| tri.contains(&s))
            .map(|(i, _)| i)
            .collect()
    }

    fn rotate_to_front(tri: [Side; 3], s: Side) -> [Side; 3] {
        if tri[0] == s {
            tri
        } else if tri[1] == s {
            [tri[1], tri[2], tri[0]]
        } else {
            [tri[2], tri[0], tri[1]]
        }
    }

    /// Neighbor roles around an internal arc.
    pub fn local_config(&self, k: Side) -> Result<LocalConfig, SurfaceError> {
        if !self.is_internal(k) {
            return Err(SurfaceError::NotInternal(k));
        }
        let tris = self.triangles_of(k);
        debug_assert_eq!(tris.len(), 2);
        let (ta, tb) = (tris[0], tris[1]);
        // ccw (k, x, y) has arrows k→x and y→k inside the triangle
        let a = Self::rotate_to_front(self.triangles[ta], k);
        let b = Self::rotate_to_front(self.triangles[tb], k);
        let (m1, l1) = (a[1], a[2]);
        let (m2, l2) = (b[1], b[2]);
        let coincidence = match (l1 == l2, m1 == m2) {
            (true, true) => return Err(SurfaceError::TorusOnePointExcluded),
            (true, false) => Coincidence::InNeighbors,
            (false, true) => Coincidence::OutNeighbors,
            (false, false) => Coincidence::None,
        };
        Ok(LocalConfig {
            k,
            tri_a: ta,
            tri_b: tb,
            l1,
            m1,
            l2,
            m2,
            coincidence,
        })
    }

    /// Replace arc `k` by the opposite diagonal of its quadrilateral.
    pub fn flip(&self, k: Side) -> Result<Triangulation, SurfaceError> {
        let lc = self.local_config(k)?;
        // A = (k, x, y), B = (k, u, v)  ->  A' = (k, y, u), B' = (k, v, x)
        let (x, y, u, v) = (lc.m1, lc.l1, lc.m2, lc.l2);
        let mut triangles = self.triangles.clone();
        triangles[lc.tri_a] = [k, y, u];
        triangles[lc.tri_b] = [k, v, x];
        Triangulation::new(self.n_internal, self.n_boundary, triangles)
    }

    /// Index of the triangle with the given content, up to rotation.
    pub fn triangle_index(&self, content: [Side; 3]) -> Option<usize> {
        let key = min_rotation(content);
        self.triangles.iter().position(|&t| t == key)
    }

    /// Hashable form invariant under triangle reordering and rotation.
    pub fn canonical_key(&self) -> Vec<[Side; 3]> {
        Self::key_of(&self.triangles)
    }

    fn key_of(triangles: &[[Side; 3]]) -> Vec<[Side; 3]> {
        let mut tris: Vec<[Side; 3]> = triangles.iter().copied().map(min_rotation).collect();
        tris.sort();
        tris
    }

    /// Key invariant under relabeling of internal arcs as well; flips keep
    /// arc labels, so two routes to the same geometric triangulation may
    /// differ by an internal-label permutation.
    pub fn unlabeled_key(&self) -> Vec<[Side; 3]> {
        let n = self.n_internal;
        let mut perm: Vec<Side> = (0..n).collect();
        let mut best: Option<Vec<[Side; 3]>> = None;
        loop {
            let relabeled: Vec<[Side; 3]> = self
                .triangles
                .iter()
                .map(|&t| t.map(|s| if s < n { perm[s] } else { s }))
                .collect();
            let key = Self::key_of(&relabeled);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.unwrap()
    }

    /// Breadth-first enumeration of reachable triangulations with their flip
    /// paths, truncated at `budget` visited nodes. Triangulations differing
    /// only by internal-arc relabeling are identified.
    pub fn reachable(&self, budget: usize) -> Vec<(Triangulation, Vec<usize>)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(self.unlabeled_key());
        queue.push_back((self.clone(), Vec::new()));
        while let Some((t, path)) = queue.pop_front() {
            out.push((t.clone(), path.clone()));
            if out.len() >= budget {
                break;
            }
            for k in 0..self.n_internal {
                let t2 = t.flip(k).expect("internal arcs are flippable");
                if seen.insert(t2.unlabeled_key()) {
                    let mut p = path.clone();
                    p.push(k);
                    queue.push_back((t2, p));
                }
            }
        }
        out
    }
}

fn min_rotation(t: [Side; 3]) -> [Side; 3] {
    let rots = [t, [t[1], t[2], t[0]], [t[2], t[0], t[1]]];
    *rots.iter().min().unwrap()
}

/// Next lexicographic permutation in place; false after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A quiver arrow; `tri` is the triangle that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub from: Side,
    pub to: Side,
    pub tri: usize,
}

/// Quiver of a triangulation together with its length-two relations and the
/// boundary-extended exchange matrix.
///
/// Vertices run over all side labels; string modules only ever touch internal
/// vertices, while the boundary vertices carry the frozen rows of `b` and the
/// injective envelopes used for index computations.
#[derive(Debug, Clone)]
pub struct QuiverWithRelations {
    pub n: usize,
    pub m: usize,
    pub arrows: Vec<Arrow>,
    /// Pairs of arrow ids `(a, b)` with `a.to == b.from` inside one triangle;
    /// traversing `a` then `b` is a zero path.
    pub relations: BTreeSet<(usize, usize)>,
    /// Extended exchange matrix, `m × n`.
    pub b: Vec<Vec<i64>>,
}

impl QuiverWithRelations {
    pub fn arrow(&self, id: usize) -> Arrow {
        self.arrows[id]
    }

    pub fn arrows_between(&self, a: Side, b: Side) -> Vec<usize> {
        self.arrows
            .iter()
            .enumerate()
            .filter(|(_, ar)| (ar.from == a && ar.to == b) || (ar.from == b && ar.to == a))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn arrows_into(&self, v: Side) -> Vec<usize> {
        self.arrows
            .iter()
            .enumerate()
            .filter(|(_, ar)| ar.to == v)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_relation(&self, first: usize, second: usize) -> bool {
        self.relations.contains(&(first, second))
    }

    /// Column `k` of the extended matrix.
    pub fn b_column(&self, k: usize) -> Vec<i64> {
        (0..self.m).map(|i| self.b[i][k]).collect()
    }

    /// `(b_k)_+` and `(b_k)_-` as m-vectors.
    pub fn b_column_pm(&self, k: usize) -> (Vec<i64>, Vec<i64>) {
        let col = self.b_column(k);
        let plus = col.iter().map(|&v| v.max(0)).collect();
        let minus = col.iter().map(|&v| (-v).max(0)).collect();
        (plus, minus)
    }

    /// Violations of the four gentle conditions on the internal part;
    /// empty for every surface quiver.
    pub fn gentle_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let internal: Vec<usize> = (0..self.arrows.len())
            .filter(|&i| self.arrows[i].from < self.n && self.arrows[i].to < self.n)
            .collect();
        for v in 0..self.n {
            let starts = internal.iter().filter(|&&i| self.arrows[i].from == v).count();
            let ends = internal.iter().filter(|&&i| self.arrows[i].to == v).count();
            if starts > 2 || ends > 2 {
                out.push(format!("vertex {v} has {starts} starts / {ends} ends"));
            }
        }
        for &a in &internal {
            let mut comp_in_i = 0;
            let mut comp_not_i = 0;
            for &b in &internal {
                if self.arrows[a].to == self.arrows[b].from {
                    if self.is_relation(a, b) {
                        comp_in_i += 1;
                    } else {
                        comp_not_i += 1;
                    }
                }
            }
            if comp_in_i > 1 || comp_not_i > 1 {
                out.push(format!(
                    "arrow {a} composes with {comp_in_i} in I and {comp_not_i} outside I"
                ));
            }
        }
        out
    }
}

/// Quiver, relations and extended exchange matrix of a triangulation.
pub fn quiver_of(t: &Triangulation) -> QuiverWithRelations {
    let n = t.n_internal();
    let m = t.m();
    let mut arrows = Vec::new();
    for (ti, tri) in t.triangles().iter().enumerate() {
        for r in 0..3 {
            arrows.push(Arrow {
                from: tri[r],
                to: tri[(r + 1) % 3],
                tri: ti,
            });
        }
    }
    let mut relations = BTreeSet::new();
    for (i, a) in arrows.iter().enumerate() {
        for (j, b) in arrows.iter().enumerate() {
            if a.tri == b.tri && a.to == b.from && i != j {
                relations.insert((i, j));
            }
        }
    }
    // b[i][j] = #(j→i) − #(i→j): an arrow from→to adds +1 at b[to][from]
    // and −1 at b[from][to].
    let mut bmat = vec![vec![0i64; n]; m];
    for a in &arrows {
        if a.from < n {
            bmat[a.to][a.from] += 1;
        }
        if a.to < n {
            bmat[a.from][a.to] -= 1;
        }
    }
    QuiverWithRelations {
        n,
        m,
        arrows,
        relations,
        b: bmat,
    }
}

/// Convex-polygon model: side labels to vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonModel {
    pub vertex_count: usize,
    /// Endpoints of each side label (diagonals first, then boundary edges).
    pub side_endpoints: Vec<(usize, usize)>,
}

fn in_open_cyclic(v: usize, a: usize, b: usize, n: usize) -> bool {
    // v strictly between a and b going ccw from a to b
    let span = (b + n - a) % n;
    let off = (v + n - a) % n;
    off > 0 && off < span
}

pub fn chords_cross(c1: (usize, usize), c2: (usize, usize), n: usize) -> bool {
    let (a, b) = c1;
    let (c, d) = c2;
    if a == c || a == d || b == c || b == d {
        return false;
    }
    in_open_cyclic(c, a, b, n) != in_open_cyclic(d, a, b, n)
}

/// Triangulated convex polygon from a maximal set of non-crossing diagonals.
pub fn polygon_triangulation(
    vertex_count: usize,
    diagonals: &[(usize, usize)],
) -> Result<(Triangulation, PolygonModel), SurfaceError> {
    let v = vertex_count;
    if v < 4 {
        return Err(SurfaceError::InvalidChord(0, 0));
    }
    let mut chords: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in diagonals {
        if a >= v || b >= v || a == b || (a + 1) % v == b || (b + 1) % v == a {
            return Err(SurfaceError::InvalidChord(a, b));
        }
        let c = (a.min(b), a.max(b));
        if chords.contains(&c) {
            return Err(SurfaceError::InvalidChord(a, b));
        }
        chords.push(c);
    }
    for i in 0..chords.len() {
        for j in (i + 1)..chords.len() {
            if chords_cross(chords[i], chords[j], v) {
                return Err(SurfaceError::CrossingChords(
                    chords[i].0, chords[i].1, chords[j].0, chords[j].1,
                ));
            }
        }
    }
    if chords.len() != v - 3 {
        return Err(SurfaceError::NotMaximal {
            expected: v - 3,
            got: chords.len(),
        });
    }
    chords.sort();
    let n = chords.len();
    let mut side_endpoints = chords.clone();
    for i in 0..v {
        side_endpoints.push((i, (i + 1) % v));
    }
    let chord_index: BTreeMap<(usize, usize), Side> = chords
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let side_of = |a: usize, b: usize| -> Side {
        let key = (a.min(b), a.max(b));
        if let Some(&i) = chord_index.get(&key) {
            i
        } else if (key.0 + 1) % v == key.1 {
            n + key.0
        } else {
            debug_assert!((key.1 + 1) % v == key.0);
            n + key.1
        }
    };

    let mut triangles = Vec::new();
    // regions are ccw vertex lists; split along any diagonal inside
    let mut stack = vec![(0..v).collect::<Vec<usize>>()];
    while let Some(region) = stack.pop() {
        if region.len() == 3 {
            triangles.push([
                side_of(region[0], region[1]),
                side_of(region[1], region[2]),
                side_of(region[2], region[0]),
            ]);
            continue;
        }
        let len = region.len();
        let mut split_at: Option<(usize, usize)> = None;
        'outer: for i in 0..len {
            for j in (i + 2)..len {
                if i == 0 && j == len - 1 {
                    continue;
                }
                let key = (region[i].min(region[j]), region[i].max(region[j]));
                if chord_index.contains_key(&key) {
                    split_at = Some((i, j));
                    break 'outer;
                }
            }
        }
        let (i, j) = split_at.expect("maximal diagonal sets triangulate every region");
        stack.push(region[i..=j].to_vec());
        let mut other = region[j..].to_vec();
        other.extend_from_slice(&region[..=i]);
        stack.push(other);
    }
    let t = Triangulation::new(n, v, triangles)?;
    Ok((
        t,
        PolygonModel {
            vertex_count: v,
            side_endpoints,
        },
    ))
}

/// Update a polygon model across `flip(t, k)`: the new arc's endpoints are
/// the two quadrilateral corners not on the old diagonal.
pub fn flip_polygon_model(
    model: &PolygonModel,
    t: &Triangulation,
    k: Side,
) -> Result<PolygonModel, SurfaceError> {
    let lc = t.local_config(k)?;
    let common = |a: Side, b: Side| -> Option<usize> {
        let (a1, a2) = model.side_endpoints[a];
        let (b1, b2) = model.side_endpoints[b];
        [a1, a2].into_iter().find(|v| *v == b1 || *v == b2)
    };
    let q = common(lc.m1, lc.l1).ok_or(SurfaceError::NotInternal(k))?;
    let s = common(lc.m2, lc.l2).ok_or(SurfaceError::NotInternal(k))?;
    let mut side_endpoints = model.side_endpoints.clone();
    side_endpoints[k] = (q.min(s), q.max(s));
    Ok(PolygonModel {
        vertex_count: model.vertex_count,
        side_endpoints,
    })
}

/// Internal arcs crossed by the chord `(a, b)`, ordered from `a` to `b`.
pub fn polygon_crossings(
    model: &PolygonModel,
    t: &Triangulation,
    chord: (usize, usize),
) -> Result<Vec<Side>, SurfaceError> {
    let v = model.vertex_count;
    let (a, b) = chord;
    if a >= v || b >= v || a == b || (a + 1) % v == b || (b + 1) % v == a {
        return Err(SurfaceError::InvalidChord(a, b));
    }
    let mut crossed: Vec<Side> = (0..t.n_internal())
        .filter(|&s| chords_cross((a, b), model.side_endpoints[s], v))
        .collect();
    // order by the size of the region on the a-side
    let a_side_size = |s: Side| -> usize {
        let (c, d) = model.side_endpoints[s];
        let (lo, hi) = if in_open_cyclic(a, c, d, v) { (c, d) } else { (d, c) };
        (0..v).filter(|&x| in_open_cyclic(x, lo, hi, v)).count()
    };
    crossed.sort_by_key(|&s| a_side_size(s));
    Ok(crossed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_single_diagonal() {
        let (t, _) = polygon_triangulation(4, &[(0, 2)]).unwrap();
        assert_eq!(t.n_internal(), 1);
        assert_eq!(t.triangles().len(), 2);
        let q = quiver_of(&t);
        // no internal triangle sharing two internal arcs: empty internal quiver
        assert!(q
            .arrows
            .iter()
            .all(|a| a.from >= t.n_internal() || a.to >= t.n_internal()));
    }

    #[test]
    fn pentagon_fan_gives_a2() {
        let (t, _) = polygon_triangulation(5, &[(0, 2), (0, 3)]).unwrap();
        assert_eq!(t.n_internal(), 2);
        assert_eq!(t.triangles().len(), 3);
        let q = quiver_of(&t);
        let internal: Vec<&Arrow> = q
            .arrows
            .iter()
            .filter(|a| a.from < 2 && a.to < 2)
            .collect();
        assert_eq!(internal.len(), 1);
        // arcs: 0 = (0,2), 1 = (0,3); the fan triangle (0,2,3) gives 1→0
        assert_eq!((internal[0].from, internal[0].to), (1, 0));
        assert_eq!(q.b[0][1], 1);
        assert_eq!(q.b[1][0], -1);
        // no relations among internal arrows
        for &(x, y) in q.relations.iter() {
            let ax = q.arrow(x);
            let ay = q.arrow(y);
            assert!(!(ax.from < 2 && ax.to < 2 && ay.from < 2 && ay.to < 2));
        }
    }

    #[test]
    fn crossing_chords_rejected() {
        assert!(matches!(
            polygon_triangulation(5, &[(0, 2), (1, 3)]),
            Err(SurfaceError::CrossingChords(..))
        ));
        assert!(matches!(
            polygon_triangulation(5, &[(0, 2)]),
            Err(SurfaceError::NotMaximal { .. })
        ));
    }

    #[test]
    fn hexagon_internal_triangle_relations() {
        let (t, _) = polygon_triangulation(6, &[(0, 2), (2, 4), (4, 0)]).unwrap();
        let q = quiver_of(&t);
        let internal: Vec<usize> = (0..q.arrows.len())
            .filter(|&i| q.arrows[i].from < 3 && q.arrows[i].to < 3)
            .collect();
        assert_eq!(internal.len(), 3);
        // all three compositions of the 3-cycle are relations
        let mut rel = 0;
        for &i in &internal {
            for &j in &internal {
                if q.arrows[i].to == q.arrows[j].from && q.is_relation(i, j) {
                    rel += 1;
                }
            }
        }
        assert_eq!(rel, 3);
        assert!(q.gentle_violations().is_empty());
    }

    #[test]
    fn flip_is_involution() {
        let (t, _) = polygon_triangulation(6, &[(0, 2), (0, 3), (0, 4)]).unwrap();
        for k in 0..t.n_internal() {
            let t2 = t.flip(k).unwrap().flip(k).unwrap();
            assert_eq!(t.canonical_key(), t2.canonical_key());
        }
    }

    #[test]
    fn pentagon_flip_graph_has_five_nodes() {
        let (t, _) = polygon_triangulation(5, &[(0, 2), (0, 3)]).unwrap();
        assert_eq!(t.reachable(100).len(), 5);
    }

    #[test]
    fn local_config_signs() {
        let (t, _) = polygon_triangulation(5, &[(0, 2), (0, 3)]).unwrap();
        let q = quiver_of(&t);
        for k in 0..t.n_internal() {
            let lc = t.local_config(k).unwrap();
            for (l, m) in [(lc.l1, lc.m1), (lc.l2, lc.m2)] {
                if t.is_internal(l) {
                    assert_eq!(q.b[k][l], 1, "in-neighbor sign");
                }
                if t.is_internal(m) {
                    assert_eq!(q.b[k][m], -1, "out-neighbor sign");
                }
            }
        }
    }

    #[test]
    fn annulus_one_one_is_kronecker() {
        // square with left/right edges glued: arcs 0, 1; boundary 2 (inner), 3 (outer)
        let t = Triangulation::new(2, 2, vec![[2, 0, 1], [1, 3, 0]]).unwrap();
        let q = quiver_of(&t);
        assert_eq!(q.b[1][0], 2);
        assert_eq!(q.b[0][1], -2);
        let lc0 = t.local_config(0).unwrap();
        assert_eq!(lc0.coincidence, Coincidence::OutNeighbors);
        let lc1 = t.local_config(1).unwrap();
        assert_eq!(lc1.coincidence, Coincidence::InNeighbors);
    }

    #[test]
    fn torus_one_point_rejected() {
        // three arcs, no boundary, both coincidences at every arc
        let r = Triangulation::new(3, 0, vec![[0, 1, 2], [0, 1, 2]]);
        assert!(matches!(r, Err(SurfaceError::TorusOnePointExcluded)));
    }

    #[test]
    fn polygon_crossing_order() {
        let (t, model) = polygon_triangulation(6, &[(0, 2), (0, 3), (0, 4)]).unwrap();
        let w = polygon_crossings(&model, &t, (1, 5)).unwrap();
        assert_eq!(w, vec![0, 1, 2]);
        let w2 = polygon_crossings(&model, &t, (5, 1)).unwrap();
        assert_eq!(w2, vec![2, 1, 0]);
        // (1,3) shares no triangle-splitting with (0,3): it crosses (0,2) only
        let w3 = polygon_crossings(&model, &t, (1, 3)).unwrap();
        assert_eq!(w3, vec![0]);
        let w4 = polygon_crossings(&model, &t, (1, 4)).unwrap();
        assert_eq!(w4, vec![0, 1]);
    }
}
