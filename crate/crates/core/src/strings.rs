//! Strings of the gentle algebra of a triangulation: validity, canonical
//! submodules, and the rewriting of a string under a flip.
//!
//! A string is the crossing sequence of a curve with the arcs of a
//! triangulation; steps carry the quiver arrow they traverse (arrows matter:
//! with parallel arrows, vertex labels and directions alone do not determine
//! the walk). Words are identified with their reverses; the canonical
//! representative is the lexicographically smaller orientation.
//!
//! `flip_string` recomputes the crossing sequence with respect to the flipped
//! triangulation by tracking the curve through the flip quadrilateral. The
//! quadrilateral has corners `P, Q, R, S`, old diagonal `PR` (= arc `k`), new
//! diagonal `QS`, and sides `PQ, QR, RS, SP` carrying the four neighbor arcs;
//! in the coincidence situations two opposite sides are the same arc and the
//! corners glue in pairs. A crossing of the new diagonal appears between two
//! consecutive crossing points exactly when they lie on opposite sides of
//! `QS`, which is a pure bookkeeping question about side slots and corners.

use crate::surface::{
    polygon_crossings, quiver_of, Coincidence, LocalConfig, PolygonModel, QuiverWithRelations,
    Side, SurfaceError, Triangulation,
};
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StringError {
    #[error("no arrow between positions {0} and {1} in the stated direction")]
    MissingArrow(usize, usize),
    #[error("immediate backtrack at position {0}")]
    Backtrack(usize),
    #[error("relation traversed at position {0}")]
    RelationViolated(usize),
    #[error("vertex at position {0} is not an internal arc")]
    FrozenVertex(usize),
    #[error("empty word must carry an internal arc tag")]
    BadEmptyWord,
    #[error("cannot parse string: {0}")]
    Parse(String),
    #[error("segment outside the paper's case list: {0}")]
    UnclassifiableSegment(String),
    #[error("flip path search exhausted the node budget {0}")]
    SearchExhausted(usize),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    /// Arrow points from position `i` to position `i+1`.
    Right,
    /// Arrow points from position `i+1` to position `i`.
    Left,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Right => Dir::Left,
            Dir::Left => Dir::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub arrow: usize,
    pub dir: Dir,
}

/// A walk in the quiver of a triangulation, or the empty word at an arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringWord {
    vertices: Vec<Side>,
    steps: Vec<Step>,
    at_arc: Option<Side>,
}

impl StringWord {
    pub fn empty_at(arc: Side) -> Self {
        StringWord {
            vertices: Vec::new(),
            steps: Vec::new(),
            at_arc: Some(arc),
        }
    }

    pub fn single(v: Side) -> Self {
        StringWord {
            vertices: vec![v],
            steps: Vec::new(),
            at_arc: None,
        }
    }

    pub fn from_parts(vertices: Vec<Side>, steps: Vec<Step>) -> Self {
        debug_assert_eq!(steps.len() + 1, vertices.len().max(1));
        StringWord {
            vertices,
            steps,
            at_arc: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn at_arc(&self) -> Option<Side> {
        self.at_arc
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Side] {
        &self.vertices
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn reverse(&self) -> StringWord {
        if self.is_empty() {
            return self.clone();
        }
        let vertices: Vec<Side> = self.vertices.iter().rev().copied().collect();
        let steps: Vec<Step> = self
            .steps
            .iter()
            .rev()
            .map(|s| Step {
                arrow: s.arrow,
                dir: s.dir.flip(),
            })
            .collect();
        StringWord {
            vertices,
            steps,
            at_arc: None,
        }
    }

    fn order_key(&self) -> (Vec<Side>, Vec<Dir>, Vec<usize>) {
        (
            self.vertices.clone(),
            self.steps.iter().map(|s| s.dir).collect(),
            self.steps.iter().map(|s| s.arrow).collect(),
        )
    }

    /// Canonical representative of `{w, w^{-1}}`; the flag says whether the
    /// stored orientation was reversed.
    pub fn canonical_with_flag(&self) -> (StringWord, bool) {
        if self.is_empty() {
            return (self.clone(), false);
        }
        let rev = self.reverse();
        if rev.order_key() < self.order_key() {
            (rev, true)
        } else {
            (self.clone(), false)
        }
    }

    pub fn canonical(&self) -> StringWord {
        self.canonical_with_flag().0
    }

    pub fn subword(&self, lo: usize, hi: usize) -> StringWord {
        StringWord {
            vertices: self.vertices[lo..hi].to_vec(),
            steps: self.steps[lo..hi.saturating_sub(1).max(lo)].to_vec(),
            at_arc: None,
        }
    }

    /// Positions whose label is not `k`.
    pub fn non_k_positions(&self, k: Side) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vertices[i] != k).collect()
    }

    /// Hashable identity of the canonical representative (arrow ids are
    /// comparable across equal triangulations because those are normalized).
    pub fn dedup_key(&self) -> (Option<Side>, Vec<Side>, Vec<(bool, usize)>) {
        let (c, _) = self.canonical_with_flag();
        (
            c.at_arc,
            c.vertices.clone(),
            c.steps
                .iter()
                .map(|s| (s.dir == Dir::Right, s.arrow))
                .collect(),
        )
    }

    pub fn to_text(&self) -> String {
        if let Some(a) = self.at_arc {
            return format!("@arc:{}", a + 1);
        }
        let mut s = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                s.push_str(match self.steps[i - 1].dir {
                    Dir::Right => " >R ",
                    Dir::Left => " <L ",
                });
            }
            s.push_str(&(v + 1).to_string());
        }
        s
    }
}

/// Check arrow existence, no backtracking and no relation along the walk.
pub fn validate_string(w: &StringWord, q: &QuiverWithRelations) -> Result<(), StringError> {
    if w.is_empty() {
        let arc = w.at_arc().ok_or(StringError::BadEmptyWord)?;
        if arc >= q.n {
            return Err(StringError::BadEmptyWord);
        }
        return Ok(());
    }
    for (i, &v) in w.vertices.iter().enumerate() {
        if v >= q.n {
            return Err(StringError::FrozenVertex(i));
        }
    }
    for (i, st) in w.steps.iter().enumerate() {
        let a = q.arrow(st.arrow);
        let ok = match st.dir {
            Dir::Right => a.from == w.vertices[i] && a.to == w.vertices[i + 1],
            Dir::Left => a.from == w.vertices[i + 1] && a.to == w.vertices[i],
        };
        if !ok {
            return Err(StringError::MissingArrow(i, i + 1));
        }
    }
    for i in 1..w.steps.len() {
        let (s1, s2) = (w.steps[i - 1], w.steps[i]);
        if s1.arrow == s2.arrow {
            return Err(StringError::Backtrack(i));
        }
        match (s1.dir, s2.dir) {
            (Dir::Right, Dir::Right) => {
                if q.is_relation(s1.arrow, s2.arrow) {
                    return Err(StringError::RelationViolated(i));
                }
            }
            (Dir::Left, Dir::Left) => {
                if q.is_relation(s2.arrow, s1.arrow) {
                    return Err(StringError::RelationViolated(i));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// All closed index subsets of `w` as bitmasks, sorted by index tuple.
///
/// A subset is closed when every walk arrow leaving a chosen position lands
/// on a chosen position; these are exactly the canonical submodules.
pub fn canonical_submodules(w: &StringWord) -> Vec<u64> {
    let s = w.len();
    assert!(s <= 63, "submodule enumeration uses u64 masks");
    if s == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u64)> = vec![(0, 0), (0, 1)];
    while let Some((i, mask)) = stack.pop() {
        if i + 1 == s {
            out.push(mask);
            continue;
        }
        let cur = (mask >> i) & 1 == 1;
        for next in [false, true] {
            let ok = match w.steps[i].dir {
                // arrow i -> i+1: i in I forces i+1 in I
                Dir::Right => !cur || next,
                // arrow i+1 -> i: i+1 in I forces i in I
                Dir::Left => !next || cur,
            };
            if ok {
                stack.push((i + 1, mask | ((next as u64) << (i + 1))));
            }
        }
    }
    let mut keyed: Vec<(Vec<usize>, u64)> = out
        .into_iter()
        .map(|m| ((0..s).filter(|&i| (m >> i) & 1 == 1).collect(), m))
        .collect();
    keyed.sort();
    keyed.dedup();
    keyed.into_iter().map(|(_, m)| m).collect()
}

/// Dimension vector of the submodule `mask`, zero-extended to length `m`.
pub fn dim_vector(w: &StringWord, mask: u64, m: usize) -> Vec<i64> {
    let mut d = vec![0i64; m];
    for (i, &v) in w.vertices.iter().enumerate() {
        if (mask >> i) & 1 == 1 {
            d[v] += 1;
        }
    }
    d
}

pub fn mask_to_indices(mask: u64, len: usize) -> Vec<usize> {
    (0..len).filter(|&i| (mask >> i) & 1 == 1).collect()
}

/// Build a word from vertex labels and directions, resolving arrow ids.
///
/// With parallel arrows several resolutions may exist; the lexicographically
/// first valid assignment is chosen.
pub fn from_vertices_dirs(
    q: &QuiverWithRelations,
    vertices: Vec<Side>,
    dirs: Vec<Dir>,
) -> Result<StringWord, StringError> {
    if vertices.is_empty() {
        return Err(StringError::BadEmptyWord);
    }
    if dirs.len() + 1 != vertices.len() {
        return Err(StringError::Parse(format!(
            "{} vertices need {} directions",
            vertices.len(),
            vertices.len() - 1
        )));
    }
    fn search(
        q: &QuiverWithRelations,
        vertices: &[Side],
        dirs: &[Dir],
        chosen: &mut Vec<Step>,
    ) -> bool {
        let i = chosen.len();
        if i == dirs.len() {
            return true;
        }
        let (a, b) = (vertices[i], vertices[i + 1]);
        let (from, to) = match dirs[i] {
            Dir::Right => (a, b),
            Dir::Left => (b, a),
        };
        let mut cands: Vec<usize> = q
            .arrows_between(a, b)
            .into_iter()
            .filter(|&id| q.arrow(id).from == from && q.arrow(id).to == to)
            .collect();
        cands.sort();
        for id in cands {
            chosen.push(Step {
                arrow: id,
                dir: dirs[i],
            });
            let w = StringWord::from_parts(vertices[..i + 2].to_vec(), chosen.clone());
            if validate_string(&w, q).is_ok() && search(q, vertices, dirs, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    if search(q, &vertices, &dirs, &mut chosen) {
        Ok(StringWord::from_parts(vertices, chosen))
    } else {
        Err(StringError::Parse(
            "no valid arrow assignment for the given vertices and directions".into(),
        ))
    }
}

/// Parse `"v1 >R v2 <L v3"` (1-based labels) or `"@arc:i"`.
pub fn parse_string(q: &QuiverWithRelations, text: &str) -> Result<StringWord, StringError> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("@arc:") {
        let arc: usize = rest
            .trim()
            .parse()
            .map_err(|_| StringError::Parse(format!("bad arc tag {rest:?}")))?;
        if arc == 0 || arc > q.n {
            return Err(StringError::Parse(format!("arc {arc} out of range")));
        }
        return Ok(StringWord::empty_at(arc - 1));
    }
    let mut vertices = Vec::new();
    let mut dirs = Vec::new();
    for (i, tok) in text.split_whitespace().enumerate() {
        if i % 2 == 0 {
            let v: usize = tok
                .parse()
                .map_err(|_| StringError::Parse(format!("bad vertex {tok:?}")))?;
            if v == 0 {
                return Err(StringError::Parse("labels are 1-based".into()));
            }
            vertices.push(v - 1);
        } else {
            dirs.push(match tok {
                ">R" | "R" | ">" => Dir::Right,
                "<L" | "L" | "<" => Dir::Left,
                other => return Err(StringError::Parse(format!("bad direction {other:?}"))),
            });
        }
    }
    from_vertices_dirs(q, vertices, dirs)
}

/// Crossing word of a polygon chord with respect to a triangulation.
pub fn chord_word(
    t: &Triangulation,
    q: &QuiverWithRelations,
    model: &PolygonModel,
    chord: (usize, usize),
) -> Result<StringWord, StringError> {
    let crossings = polygon_crossings(model, t, chord)?;
    if crossings.is_empty() {
        let key = (chord.0.min(chord.1), chord.0.max(chord.1));
        let arc = (0..t.n_internal())
            .find(|&s| {
                let (a, b) = model.side_endpoints[s];
                (a.min(b), a.max(b)) == key
            })
            .ok_or(SurfaceError::InvalidChord(chord.0, chord.1))?;
        return Ok(StringWord::empty_at(arc));
    }
    let mut steps = Vec::new();
    for i in 0..crossings.len() - 1 {
        let (a, b) = (crossings[i], crossings[i + 1]);
        let shared: Vec<usize> = t
            .triangles_of(a)
            .into_iter()
            .filter(|ti| t.triangles_of(b).contains(ti))
            .collect();
        debug_assert_eq!(shared.len(), 1, "consecutive crossings share one triangle");
        let tri = shared[0];
        let id = q
            .arrows_between(a, b)
            .into_iter()
            .find(|&id| q.arrow(id).tri == tri)
            .ok_or(StringError::MissingArrow(i, i + 1))?;
        let dir = if q.arrow(id).from == a {
            Dir::Right
        } else {
            Dir::Left
        };
        steps.push(Step { arrow: id, dir });
    }
    let w = StringWord::from_parts(crossings, steps);
    validate_string(&w, q)?;
    Ok(w)
}

// ---------------------------------------------------------------------------
// Flip rewriting
// ---------------------------------------------------------------------------

/// Which side of the new diagonal `QS` a point lies on: the `QRS` triangle,
/// the `SPQ` triangle, or on the diagonal itself (corners `Q`, `S`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QsClass {
    ASide,
    BSide,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    X, // side PQ, carries m1
    Y, // side QR, carries l1
    U, // side RS, carries m2
    V, // side SP, carries l2
    K, // old diagonal PR
}

fn slot_class(s: Slot) -> QsClass {
    match s {
        Slot::Y | Slot::U => QsClass::ASide,
        Slot::X | Slot::V => QsClass::BSide,
        Slot::K => unreachable!("old-diagonal points are never anchors"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Corner {
    P,
    Q,
    R,
    S,
}

fn corner_class(c: Corner) -> QsClass {
    match c {
        Corner::P => QsClass::BSide,
        Corner::R => QsClass::ASide,
        Corner::Q | Corner::S => QsClass::Neutral,
    }
}

/// Corner of a quad triangle opposite one of its side slots.
fn corner_opposite(in_a: bool, s: Slot) -> Corner {
    if in_a {
        match s {
            Slot::K => Corner::Q,
            Slot::X => Corner::R,
            Slot::Y => Corner::P,
            _ => unreachable!("slot not in triangle A"),
        }
    } else {
        match s {
            Slot::K => Corner::S,
            Slot::U => Corner::P,
            Slot::V => Corner::R,
            _ => unreachable!("slot not in triangle B"),
        }
    }
}

/// Slot of the arc `label` as a side of quad triangle A or B.
fn slot_in(lc: &LocalConfig, in_a: bool, label: Side) -> Slot {
    if label == lc.k {
        Slot::K
    } else if in_a {
        if label == lc.m1 {
            Slot::X
        } else {
            debug_assert_eq!(label, lc.l1);
            Slot::Y
        }
    } else if label == lc.m2 {
        Slot::U
    } else {
        debug_assert_eq!(label, lc.l2);
        Slot::V
    }
}

/// Segment tags: `Outside` pieces avoid `H`, quad pieces carry the case tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseTag {
    Outside,
    /// Empty word at the flipped arc, or the single-crossing word of it.
    Trivial,
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
    B8,
}

#[derive(Debug, Clone)]
pub struct Tile {
    pub tag: CaseTag,
    /// Position range in the old word.
    pub old: (usize, usize),
    /// Position range in the new word.
    pub new: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct FlipOutcome {
    /// Rewritten word, in the orientation inherited from the input.
    pub word: StringWord,
    pub tiles: Vec<Tile>,
}

struct RunRewrite {
    labels: Vec<Side>,
    /// For each new step, whether its segment lies in the new triangle A'
    /// (class `ASide`) or B'.
    step_in_a: Vec<bool>,
    tag: CaseTag,
}

/// Terminal of a run: how the curve continues past the run's end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Terminal {
    Outside,
    /// Curve endpoint inside the quad, in triangle A (`true`) or B.
    CornerIn(bool),
}

fn is_quad_triangle(lc: &LocalConfig, tri: usize) -> bool {
    tri == lc.tri_a || tri == lc.tri_b
}

/// Triangles of `label` other than `near`; used to find the far side of an
/// end crossing.
fn far_triangle(t: &Triangulation, label: Side, near: usize) -> usize {
    let tris = t.triangles_of(label);
    if tris.len() == 1 {
        tris[0]
    } else if tris[0] == near {
        tris[1]
    } else {
        tris[0]
    }
}

fn classify_run(lc: &LocalConfig, labels: &[Side], at_word_start: bool, at_word_end: bool) -> CaseTag {
    let k = lc.k;
    let coincident = lc.coincidence != Coincidence::None;
    let is_l = |s: Side| s == lc.l1 || s == lc.l2;
    let is_m = |s: Side| s == lc.m1 || s == lc.m2;
    let has_k = labels.contains(&k);
    // cap type: the neighbor pair that is NOT coincident
    let is_cap = |s: Side| match lc.coincidence {
        Coincidence::InNeighbors => is_m(s),
        Coincidence::OutNeighbors => is_l(s),
        Coincidence::None => false,
    };
    if !coincident {
        match (labels.len(), has_k) {
            (1, true) => CaseTag::Trivial,
            (1, false) => {
                if at_word_start && !at_word_end {
                    CaseTag::A5
                } else {
                    CaseTag::A6
                }
            }
            (2, true) => CaseTag::A4,
            (2, false) => CaseTag::A3,
            (3, true) => {
                let (a, b) = (labels[0], labels[2]);
                if (is_l(a) && is_m(b)) || (is_m(a) && is_l(b)) {
                    CaseTag::A1
                } else {
                    CaseTag::A2
                }
            }
            _ => CaseTag::A2,
        }
    } else {
        match (labels.len(), has_k) {
            (1, true) => CaseTag::Trivial,
            (1, false) => {
                if at_word_start && !at_word_end {
                    CaseTag::B4
                } else {
                    CaseTag::B5
                }
            }
            (2, true) => CaseTag::B3,
            (2, false) => CaseTag::A3,
            (3, true) if labels[0] != labels[2] && !is_cap(labels[1]) => CaseTag::B1,
            (4, true) if labels[0] == labels[3] && is_cap(labels[0]) => CaseTag::B2,
            _ => {
                let caps = (is_cap(labels[0]) as usize) + (is_cap(*labels.last().unwrap()) as usize);
                match caps {
                    0 => CaseTag::B6,
                    1 => CaseTag::B7,
                    _ => CaseTag::B8,
                }
            }
        }
    }
}

fn rewrite_run(
    w: &StringWord,
    t: &Triangulation,
    q: &QuiverWithRelations,
    lc: &LocalConfig,
    lo: usize,
    hi: usize, // inclusive
) -> Result<RunRewrite, StringError> {
    let r = hi - lo + 1;
    let labels: Vec<Side> = (lo..=hi).map(|i| w.vertices()[i]).collect();
    let at_word_start = lo == 0;
    let at_word_end = hi + 1 == w.len();
    let tag = classify_run(lc, &labels, at_word_start, at_word_end);

    // inner segment triangles: between crossings j and j+1 of the run
    let inner_in_a: Vec<bool> = (0..r.saturating_sub(1))
        .map(|j| {
            let tri = q.arrow(w.steps()[lo + j].arrow).tri;
            debug_assert!(is_quad_triangle(lc, tri), "run steps stay in the quad");
            tri == lc.tri_a
        })
        .collect();

    // terminals
    let glued = |label: Side| match lc.coincidence {
        Coincidence::InNeighbors => label == lc.l1,
        Coincidence::OutNeighbors => label == lc.m1,
        Coincidence::None => false,
    };
    let left_terminal: Terminal;
    let right_terminal: Terminal;
    if r == 1 {
        let label = labels[0];
        if at_word_start && at_word_end {
            if glued(label) || label == lc.k {
                left_terminal = Terminal::CornerIn(true);
                right_terminal = Terminal::CornerIn(false);
            } else {
                // one side is the quad, the other the outside triangle
                let quad = t
                    .triangles_of(label)
                    .into_iter()
                    .find(|&ti| is_quad_triangle(lc, ti))
                    .expect("H-arcs bound the quad");
                left_terminal = Terminal::Outside;
                right_terminal = Terminal::CornerIn(quad == lc.tri_a);
            }
        } else if at_word_start {
            // junction on the right is outside, so the curve ends leftwards
            // in the quad triangle of the label
            let junction_tri = q.arrow(w.steps()[hi].arrow).tri;
            if is_quad_triangle(lc, junction_tri) {
                return Err(StringError::UnclassifiableSegment(
                    "single-crossing run with quad junction".into(),
                ));
            }
            let quad = t
                .triangles_of(label)
                .into_iter()
                .find(|&ti| is_quad_triangle(lc, ti))
                .expect("H-arcs bound the quad");
            left_terminal = Terminal::CornerIn(quad == lc.tri_a);
            right_terminal = Terminal::Outside;
        } else if at_word_end {
            let junction_tri = q.arrow(w.steps()[lo - 1].arrow).tri;
            if is_quad_triangle(lc, junction_tri) {
                return Err(StringError::UnclassifiableSegment(
                    "single-crossing run with quad junction".into(),
                ));
            }
            let quad = t
                .triangles_of(label)
                .into_iter()
                .find(|&ti| is_quad_triangle(lc, ti))
                .expect("H-arcs bound the quad");
            left_terminal = Terminal::Outside;
            right_terminal = Terminal::CornerIn(quad == lc.tri_a);
        } else {
            return Err(StringError::UnclassifiableSegment(
                "isolated single H-crossing in the middle of a word".into(),
            ));
        }
    } else {
        left_terminal = if at_word_start {
            let near = if inner_in_a[0] { lc.tri_a } else { lc.tri_b };
            let far = far_triangle(t, labels[0], near);
            if is_quad_triangle(lc, far) {
                Terminal::CornerIn(far == lc.tri_a)
            } else {
                Terminal::Outside
            }
        } else {
            Terminal::Outside
        };
        right_terminal = if at_word_end {
            let near = if inner_in_a[r - 2] { lc.tri_a } else { lc.tri_b };
            let far = far_triangle(t, labels[r - 1], near);
            if is_quad_triangle(lc, far) {
                Terminal::CornerIn(far == lc.tri_a)
            } else {
                Terminal::Outside
            }
        } else {
            Terminal::Outside
        };
    }

    // anchors: corner terminals and non-k crossings, each with facing classes
    #[derive(Clone, Copy)]
    struct Anchor {
        label: Option<Side>,           // None for corners
        left_class: Option<QsClass>,   // class seen from the left segment
        right_class: Option<QsClass>,  // class seen from the right segment
    }
    let facing_tri = |j: usize, left: bool| -> Option<bool> {
        // triangle (in A?) adjacent to crossing j on the given side
        if left {
            if j == 0 {
                match left_terminal {
                    Terminal::Outside => None,
                    Terminal::CornerIn(a) => Some(a),
                }
            } else {
                Some(inner_in_a[j - 1])
            }
        } else if j + 1 == r {
            match right_terminal {
                Terminal::Outside => None,
                Terminal::CornerIn(a) => Some(a),
            }
        } else {
            Some(inner_in_a[j])
        }
    };

    let mut anchors: Vec<Anchor> = Vec::new();
    if let Terminal::CornerIn(in_a) = left_terminal {
        let slot = slot_in(lc, in_a, labels[0]);
        let c = corner_class(corner_opposite(in_a, slot));
        anchors.push(Anchor {
            label: None,
            left_class: None,
            right_class: Some(c),
        });
    }
    for j in 0..r {
        if labels[j] == lc.k {
            continue;
        }
        let lclass = facing_tri(j, true).map(|in_a| slot_class(slot_in(lc, in_a, labels[j])));
        let rclass = facing_tri(j, false).map(|in_a| slot_class(slot_in(lc, in_a, labels[j])));
        anchors.push(Anchor {
            label: Some(labels[j]),
            left_class: lclass,
            right_class: rclass,
        });
    }
    if let Terminal::CornerIn(in_a) = right_terminal {
        let slot = slot_in(lc, in_a, labels[r - 1]);
        let c = corner_class(corner_opposite(in_a, slot));
        anchors.push(Anchor {
            label: None,
            left_class: Some(c),
            right_class: None,
        });
    }

    // walk anchor pairs, inserting the new diagonal between opposite classes
    let mut new_labels: Vec<Side> = Vec::new();
    let mut step_in_a: Vec<bool> = Vec::new();
    let push_cross = |label: Side, seg_class: Option<QsClass>, step_in_a: &mut Vec<bool>, new_labels: &mut Vec<Side>| {
        if !new_labels.is_empty() {
            let c = seg_class.expect("interior segments have a class");
            step_in_a.push(c == QsClass::ASide);
        }
        new_labels.push(label);
    };
    for win in 0..anchors.len().saturating_sub(1) {
        let a = anchors[win];
        let b = anchors[win + 1];
        if win == 0 {
            if let Some(l) = a.label {
                push_cross(l, None, &mut step_in_a, &mut new_labels);
            }
        }
        let ca = a.right_class;
        let cb = b.left_class;
        let insert = matches!(
            (ca, cb),
            (Some(QsClass::ASide), Some(QsClass::BSide)) | (Some(QsClass::BSide), Some(QsClass::ASide))
        );
        if insert {
            push_cross(lc.k, ca, &mut step_in_a, &mut new_labels);
        }
        if let Some(l) = b.label {
            let seg = if insert { cb } else { ca.or(cb) };
            push_cross(l, seg, &mut step_in_a, &mut new_labels);
        }
    }
    if anchors.len() == 1 {
        if let Some(l) = anchors[0].label {
            push_cross(l, None, &mut step_in_a, &mut new_labels);
        }
    }
    Ok(RunRewrite {
        labels: new_labels,
        step_in_a,
        tag,
    })
}

fn lookup_arrow(
    q: &QuiverWithRelations,
    a: Side,
    b: Side,
    tri: usize,
    pos: usize,
) -> Result<Step, StringError> {
    let id = q
        .arrows_between(a, b)
        .into_iter()
        .find(|&id| q.arrow(id).tri == tri)
        .ok_or(StringError::MissingArrow(pos, pos + 1))?;
    let dir = if q.arrow(id).from == a {
        Dir::Right
    } else {
        Dir::Left
    };
    Ok(Step { arrow: id, dir })
}

/// Rewriting `w ↦ μ_k(w)` with the tile decomposition used by weight
/// transport. The output keeps the input's orientation.
pub fn flip_string_detailed(
    w: &StringWord,
    t: &Triangulation,
    k: Side,
) -> Result<FlipOutcome, StringError> {
    let lc = t.local_config(k)?;
    let q = quiver_of(t);
    let t_new = t.flip(k)?;
    let q_new = quiver_of(&t_new);
    // new quad triangles A' = (k, l1, m2), B' = (k, l2, m1) by content, and a
    // content map for the unchanged triangles
    let tri_a_new = t_new
        .triangle_index([k, lc.l1, lc.m2])
        .expect("flip created A'");
    let tri_b_new = t_new
        .triangle_index([k, lc.l2, lc.m1])
        .expect("flip created B'");
    let map_old_tri = |old: usize| -> usize {
        t_new
            .triangle_index(t.triangles()[old])
            .expect("non-quad triangles persist across the flip")
    };

    // empty word and the bare flipped-arc word are the trivial pair
    if w.is_empty() {
        let arc = w.at_arc().ok_or(StringError::BadEmptyWord)?;
        if arc == k {
            return Ok(FlipOutcome {
                word: StringWord::single(k),
                tiles: vec![Tile {
                    tag: CaseTag::Trivial,
                    old: (0, 0),
                    new: (0, 1),
                }],
            });
        }
        return Ok(FlipOutcome {
            word: w.clone(),
            tiles: Vec::new(),
        });
    }
    if w.len() == 1 && w.vertices()[0] == k {
        return Ok(FlipOutcome {
            word: StringWord::empty_at(k),
            tiles: vec![Tile {
                tag: CaseTag::Trivial,
                old: (0, 1),
                new: (0, 0),
            }],
        });
    }

    let in_h = |s: Side| s == k || s == lc.l1 || s == lc.l2 || s == lc.m1 || s == lc.m2;

    // tiles over old positions: maximal H-runs, refined at steps leaving the quad
    let mut tiles_old: Vec<(usize, usize, bool)> = Vec::new(); // (lo, hi inclusive, is_quad)
    let mut i = 0;
    while i < w.len() {
        let h = in_h(w.vertices()[i]);
        let mut j = i;
        while j + 1 < w.len() && in_h(w.vertices()[j + 1]) == h {
            if h {
                let tri = q.arrow(w.steps()[j].arrow).tri;
                if !is_quad_triangle(&lc, tri) {
                    break;
                }
            }
            j += 1;
        }
        tiles_old.push((i, j, h));
        i = j + 1;
    }

    let mut new_vertices: Vec<Side> = Vec::new();
    let mut new_steps: Vec<Step> = Vec::new();
    let mut tiles: Vec<Tile> = Vec::new();

    for (ti, &(lo, hi, is_h)) in tiles_old.iter().enumerate() {
        // junction step from the previous tile
        if ti > 0 {
            let pos = lo - 1; // step between old positions lo-1 and lo
            let old_step = w.steps()[pos];
            let oa = q.arrow(old_step.arrow);
            debug_assert!(!is_quad_triangle(&lc, oa.tri), "junction steps avoid the quad");
            let st = lookup_arrow(
                &q_new,
                w.vertices()[pos],
                w.vertices()[pos + 1],
                map_old_tri(oa.tri),
                pos,
            )?;
            new_steps.push(Step {
                arrow: st.arrow,
                dir: old_step.dir,
            });
        }
        let start_new = new_vertices.len();
        if !is_h {
            for p in lo..=hi {
                if p > lo {
                    let old_step = w.steps()[p - 1];
                    let oa = q.arrow(old_step.arrow);
                    let st = lookup_arrow(
                        &q_new,
                        w.vertices()[p - 1],
                        w.vertices()[p],
                        map_old_tri(oa.tri),
                        p - 1,
                    )?;
                    new_steps.push(Step {
                        arrow: st.arrow,
                        dir: old_step.dir,
                    });
                }
                new_vertices.push(w.vertices()[p]);
            }
            tiles.push(Tile {
                tag: CaseTag::Outside,
                old: (lo, hi + 1),
                new: (start_new, new_vertices.len()),
            });
        } else {
            let rr = rewrite_run(w, t, &q, &lc, lo, hi)?;
            for (j, &label) in rr.labels.iter().enumerate() {
                if j > 0 {
                    let tri = if rr.step_in_a[j - 1] { tri_a_new } else { tri_b_new };
                    let st = lookup_arrow(&q_new, rr.labels[j - 1], label, tri, j - 1)?;
                    new_steps.push(st);
                }
                new_vertices.push(label);
            }
            tiles.push(Tile {
                tag: rr.tag,
                old: (lo, hi + 1),
                new: (start_new, new_vertices.len()),
            });
        }
    }

    let word = StringWord::from_parts(new_vertices, new_steps);
    validate_string(&word, &q_new).map_err(|e| {
        StringError::UnclassifiableSegment(format!("rewritten word invalid: {e}"))
    })?;
    Ok(FlipOutcome { word, tiles })
}

/// `μ_k(w)` in canonical form.
pub fn flip_string(
    w: &StringWord,
    t: &Triangulation,
    k: Side,
) -> Result<StringWord, StringError> {
    Ok(flip_string_detailed(w, t, k)?.word.canonical())
}

/// Shortest flip sequence from `t` to a triangulation containing the arc with
/// crossing word `word`, by breadth-first search.
///
/// States are pairs (triangulation, rewritten word): on surfaces with few
/// boundary labels, combinatorially equal triangulations can carry the arc
/// in genuinely different positions, so the word is part of the identity.
pub fn find_flip_path(
    t: &Triangulation,
    word: &StringWord,
    budget: usize,
) -> Result<Vec<usize>, StringError> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert((t.canonical_key(), word.dedup_key()));
    queue.push_back((t.clone(), word.clone(), Vec::new()));
    let mut popped = 0usize;
    while let Some((tri, w, path)) = queue.pop_front() {
        if w.is_empty() {
            return Ok(path);
        }
        popped += 1;
        if popped > budget {
            return Err(StringError::SearchExhausted(budget));
        }
        for k in 0..tri.n_internal() {
            let w2 = flip_string(&w, &tri, k)?;
            let t2 = tri.flip(k)?;
            if seen.insert((t2.canonical_key(), w2.dedup_key())) {
                let mut p = path.clone();
                p.push(k);
                queue.push_back((t2, w2, p));
            }
        }
    }
    Err(StringError::SearchExhausted(budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::polygon_triangulation;

    fn pentagon() -> (Triangulation, QuiverWithRelations, PolygonModel) {
        let (t, model) = polygon_triangulation(5, &[(0, 2), (0, 3)]).unwrap();
        let q = quiver_of(&t);
        (t, q, model)
    }

    #[test]
    fn single_vertex_word_is_valid() {
        let (_, q, _) = pentagon();
        let w = StringWord::single(0);
        validate_string(&w, &q).unwrap();
        assert_eq!(canonical_submodules(&w), vec![0, 1]);
    }

    #[test]
    fn pentagon_two_crossing_word() {
        let (t, q, model) = pentagon();
        // chord (1,4) crosses both diagonals
        let w = chord_word(&t, &q, &model, (1, 4)).unwrap();
        assert_eq!(w.len(), 2);
        validate_string(&w, &q).unwrap();
        // submodule structure of a single-arrow word: one side is closed
        let cs = canonical_submodules(&w);
        assert_eq!(cs.len(), 3);
    }

    #[test]
    fn relation_violation_detected() {
        let (t, _) = polygon_triangulation(6, &[(0, 2), (2, 4), (4, 0)]).unwrap();
        let q = quiver_of(&t);
        // the 3-cycle 0→1→2→0 has all compositions in the relations
        let r = from_vertices_dirs(&q, vec![0, 1, 2], vec![Dir::Right, Dir::Right]);
        assert!(r.is_err());
    }

    #[test]
    fn canonical_submodules_match_bruteforce_small() {
        let (t, q, model) = pentagon();
        let w = chord_word(&t, &q, &model, (1, 4)).unwrap();
        let cs = canonical_submodules(&w);
        // brute force with the substring criterion
        let mut expect = Vec::new();
        's: for mask in 0u64..(1 << w.len()) {
            for (i, st) in w.steps().iter().enumerate() {
                let a = (mask >> i) & 1 == 1;
                let b = (mask >> (i + 1)) & 1 == 1;
                let ok = match st.dir {
                    Dir::Right => !a || b,
                    Dir::Left => !b || a,
                };
                if !ok {
                    continue 's;
                }
            }
            expect.push(mask);
        }
        let mut got = cs.clone();
        got.sort();
        expect.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn flip_string_trivial_pair() {
        let (t, _, _) = pentagon();
        let e = StringWord::empty_at(0);
        let out = flip_string_detailed(&e, &t, 0).unwrap();
        assert_eq!(out.word.vertices(), &[0]);
        let back = flip_string_detailed(&out.word, &t.flip(0).unwrap(), 0).unwrap();
        assert!(back.word.is_empty());
        assert_eq!(back.word.at_arc(), Some(0));
    }

    #[test]
    fn flip_string_involution_on_pentagon() {
        let (t, q, model) = pentagon();
        for chord in [(1, 3), (1, 4), (2, 4), (2, 0), (3, 0), (3, 1)] {
            let w = match chord_word(&t, &q, &model, chord) {
                Ok(w) => w,
                Err(_) => continue,
            };
            for k in 0..t.n_internal() {
                let t2 = t.flip(k).unwrap();
                let w2 = flip_string(&w, &t, k).unwrap();
                let w3 = flip_string(&w2, &t2, k).unwrap();
                assert_eq!(w3, w.canonical(), "chord {chord:?} flip {k}");
            }
        }
    }

    #[test]
    fn flip_string_case1_shape() {
        // hexagon fan: arcs 0=(0,2), 1=(0,3), 2=(0,4); A_3 quiver 2→1→0.
        let (t, model) = polygon_triangulation(6, &[(0, 2), (0, 3), (0, 4)]).unwrap();
        let q = quiver_of(&t);
        // chord (1,4) crosses the diagonals (0,2) and (0,3)
        let w = chord_word(&t, &q, &model, (1, 4)).unwrap();
        assert_eq!(w.vertices(), &[0, 1]);
        let w2 = flip_string(&w, &t, 1).unwrap();
        let t2 = t.flip(1).unwrap();
        validate_string(&w2, &quiver_of(&t2)).unwrap();
        let w3 = flip_string(&w2, &t2, 1).unwrap();
        assert_eq!(w3, w.canonical());
    }

    #[test]
    fn kronecker_flip_grows_and_shrinks() {
        // annulus with 1+1 marked points
        let t = Triangulation::new(2, 2, vec![[2, 0, 1], [1, 3, 0]]).unwrap();
        let q = quiver_of(&t);
        // word (0,1,0): in-coincidence alternating family at k=1
        let w = from_vertices_dirs(&q, vec![0, 1, 0], vec![Dir::Right, Dir::Left]).unwrap();
        let out = flip_string_detailed(&w, &t, 1).unwrap();
        assert_eq!(out.word.len(), 5, "s=1 grows to s+2 diagonal crossings");
        let t2 = t.flip(1).unwrap();
        validate_string(&out.word, &quiver_of(&t2)).unwrap();
        let back = flip_string(&out.word, &t2, 1).unwrap();
        assert_eq!(back, w.canonical());
    }

    #[test]
    fn find_flip_path_on_pentagon() {
        let (t, q, model) = pentagon();
        // arc (1,3): crosses only arc 0
        let w = chord_word(&t, &q, &model, (1, 3)).unwrap();
        let p = find_flip_path(&t, &w, 100).unwrap();
        assert_eq!(p.len(), 1);
        // already present arc: empty path
        let e = StringWord::empty_at(1);
        assert!(find_flip_path(&t, &e, 100).unwrap().is_empty());
        // exhausted budget
        let werr = chord_word(&t, &q, &model, (1, 4)).unwrap();
        assert!(matches!(
            find_flip_path(&t, &werr, 1),
            Err(StringError::SearchExhausted(1))
        ));
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let (t, q, model) = pentagon();
        let w = chord_word(&t, &q, &model, (1, 4)).unwrap();
        let txt = w.to_text();
        let w2 = parse_string(&q, &txt).unwrap();
        assert_eq!(w.canonical(), w2.canonical());
        let e = parse_string(&q, "@arc:2").unwrap();
        assert_eq!(e.at_arc(), Some(1));
    }
}
