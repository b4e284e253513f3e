//! Faces of permutahedra as ordered partitions, the weak order, leveled
//! planar trees, and the Tonks projection onto associahedron faces.
//!
//! Conventions used throughout the crate:
//!
//! * A face of `P_n` is an ordered partition `B_1|...|B_k` of `{1..n}`.
//!   Vertices are permutations written as singleton blocks.
//! * The corresponding leveled planar tree has `n + 1` leaves and `k`
//!   levels; the gap between leaves `i` and `i + 1` carries the value
//!   `n + 1 - i`, and its level is the index of the block containing that
//!   value (level 1 is the root level).
//! * The minimum face `1|2|...|n` in the weak order is the planar left comb.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermutahedronError {
    #[error("invalid ordered partition: {0}")]
    InvalidPartition(String),
    #[error("cannot parse face: {0}")]
    Parse(String),
    #[error("invalid level vectors: {0}")]
    InvalidLevels(String),
}

/// An ordered partition `B_1|...|B_k` of `{1..n}`; blocks are sorted
/// ascending internally, block order is semantic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    blocks: Vec<Vec<u32>>,
}

impl Face {
    pub fn new(mut blocks: Vec<Vec<u32>>) -> Result<Self, PermutahedronError> {
        let mut seen = BTreeSet::new();
        let mut total = 0usize;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(PermutahedronError::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &v in block.iter() {
                if v == 0 || !seen.insert(v) {
                    return Err(PermutahedronError::InvalidPartition(format!(
                        "value {v} repeated or zero"
                    )));
                }
            }
            total += block.len();
        }
        if seen.last().copied().unwrap_or(0) as usize != total {
            return Err(PermutahedronError::InvalidPartition(
                "values are not exactly 1..=n".into(),
            ));
        }
        Ok(Face { blocks })
    }

    /// The top cell of `P_n`: a single block.
    pub fn top(n: u32) -> Self {
        Face { blocks: vec![(1..=n).collect()] }
    }

    /// The vertex given by a permutation word.
    pub fn vertex(word: &[u32]) -> Result<Self, PermutahedronError> {
        Face::new(word.iter().map(|&v| vec![v]).collect())
    }

    pub fn n(&self) -> u32 {
        self.blocks.iter().map(|b| b.len() as u32).sum()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.n() as usize - self.blocks.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// The permutation word, if this face is a vertex.
    pub fn word(&self) -> Option<Vec<u32>> {
        self.is_vertex().then(|| self.blocks.iter().map(|b| b[0]).collect())
    }

    /// Codimension-one faces: split one block into two nonempty parts,
    /// preserving everything else.
    pub fn boundary(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for (i, block) in self.blocks.iter().enumerate() {
            if block.len() < 2 {
                continue;
            }
            // iterate proper sub-bitmasks: elements with bit set form the
            // earlier block
            for mask in 1..(1u32 << block.len()) - 1 {
                let mut first = Vec::new();
                let mut second = Vec::new();
                for (j, &v) in block.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        first.push(v);
                    } else {
                        second.push(v);
                    }
                }
                let mut blocks = self.blocks.clone();
                blocks.splice(i..=i, [first, second]);
                out.push(Face { blocks });
            }
        }
        out.sort_unstable();
        out
    }

    /// Every face of this face, including itself, deterministically ordered.
    pub fn closure(&self) -> Vec<Face> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            if seen.insert(f.clone()) {
                stack.extend(f.boundary());
            }
        }
        seen.into_iter().collect()
    }

    /// Is `self` a face of `other`? Holds iff each block of `other` is the
    /// union of a consecutive run of blocks of `self`.
    pub fn is_face_of(&self, other: &Face) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let mut i = 0;
        for target in &other.blocks {
            let mut merged = Vec::new();
            while merged.len() < target.len() {
                let Some(block) = self.blocks.get(i) else { return false };
                merged.extend(block.iter().copied());
                i += 1;
            }
            merged.sort_unstable();
            if &merged != target {
                return false;
            }
        }
        i == self.blocks.len()
    }

    /// Vertex words of this face: block contents permuted independently.
    pub fn vertices(&self) -> Vec<Vec<u32>> {
        let mut words = vec![Vec::new()];
        for block in &self.blocks {
            let perms = permutations(block);
            let mut next = Vec::with_capacity(words.len() * perms.len());
            for w in &words {
                for p in &perms {
                    let mut ext = w.clone();
                    ext.extend(p.iter().copied());
                    next.push(ext);
                }
            }
            words = next;
        }
        words.sort_unstable();
        words
    }

    /// Weak-order minimum vertex: each block ascending.
    pub fn min_vertex(&self) -> Vec<u32> {
        self.blocks.iter().flat_map(|b| b.iter().copied()).collect()
    }

    /// Weak-order maximum vertex: each block descending.
    pub fn max_vertex(&self) -> Vec<u32> {
        self.blocks.iter().flat_map(|b| b.iter().rev().copied()).collect()
    }

    /// The reversing symmetry `a_1|...|a_k -> a_k|...|a_1`: block contents
    /// kept, block order flipped. On leveled trees this turns the tree
    /// upside down.
    pub fn tau(&self) -> Face {
        let blocks = self.blocks.iter().rev().cloned().collect();
        Face { blocks }
    }

    /// Rebuild with each value sent through `map` (1-based); used when
    /// faces are transported between blocks of larger permutahedra.
    pub fn relabel(&self, map: impl Fn(u32) -> u32) -> Result<Face, PermutahedronError> {
        Face::new(self.blocks.iter().map(|b| b.iter().map(|&v| map(v)).collect()).collect())
    }

    /// Level of each leaf gap: entry `g - 1` (for `g` in `1..=n`) is the
    /// block index, 1-based, of the value `n + 1 - g`.
    pub fn gap_levels(&self) -> Vec<u32> {
        let n = self.n();
        let mut levels = vec![0u32; n as usize];
        for (i, block) in self.blocks.iter().enumerate() {
            for &v in block {
                levels[(n + 1 - v) as usize - 1] = i as u32 + 1;
            }
        }
        levels
    }

    pub fn parse(text: &str) -> Result<Self, PermutahedronError> {
        let mut blocks = Vec::new();
        for chunk in text.split('|') {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                return Err(PermutahedronError::Parse(format!("empty block in {text:?}")));
            }
            let block = if chunk.contains(',') {
                chunk
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .map_err(|_| PermutahedronError::Parse(format!("bad value {t:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            } else if chunk.chars().all(|c| c.is_ascii_digit() && c != '0') {
                // juxtaposed single digits, the narrow (n <= 9) form
                chunk.chars().map(|c| c.to_digit(10).unwrap()).collect()
            } else {
                // a lone multi-digit value, e.g. the singleton block "10"
                vec![chunk
                    .parse::<u32>()
                    .map_err(|_| PermutahedronError::Parse(format!("bad block {chunk:?}")))?]
            };
            blocks.push(block);
        }
        Face::new(blocks)
    }
}

impl fmt::Display for Face {
    /// Values are juxtaposed through `n = 9` and comma-separated beyond.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.n() >= 10;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, v) in block.iter().enumerate() {
                if wide && j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &v) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, v);
            out.push(tail);
        }
    }
    out
}

/// All faces of `P_n`, deterministically ordered.
pub fn all_faces(n: u32) -> Vec<Face> {
    let mut partial: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for v in 1..=n {
        let mut next = Vec::new();
        for state in &partial {
            for i in 0..state.len() {
                let mut s = state.clone();
                s[i].push(v);
                next.push(s);
            }
            for i in 0..=state.len() {
                let mut s = state.clone();
                s.insert(i, vec![v]);
                next.push(s);
            }
        }
        partial = next;
    }
    let mut faces: Vec<Face> =
        partial.into_iter().map(|blocks| Face::new(blocks).expect("valid by construction")).collect();
    faces.sort_unstable();
    faces
}

/// Ordered-Bell numbers via the binomial recursion; used as an independent
/// census for [`all_faces`].
pub fn fubini(n: u32) -> u64 {
    let n = n as usize;
    let mut binom = vec![vec![0u64; n + 1]; n + 1];
    for (i, row) in binom.iter_mut().enumerate() {
        row[0] = 1;
        for j in 1..=i {
            row[j] = if j == i { 1 } else { 0 };
        }
    }
    for i in 2..=n {
        for j in 1..i {
            binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
        }
    }
    let mut a = vec![0u64; n + 1];
    a[0] = 1;
    for m in 1..=n {
        let mut total = 0;
        for k in 1..=m {
            total += binom[m][k] * a[m - k];
        }
        a[m] = total;
    }
    a[n]
}

/// Inversion set of a permutation word: pairs `(x, y)` with `x < y` and `x`
/// appearing after `y`.
pub fn inversions(word: &[u32]) -> BTreeSet<(u32, u32)> {
    let mut inv = BTreeSet::new();
    for (i, &later) in word.iter().enumerate() {
        for &earlier in &word[..i] {
            if later < earlier {
                inv.insert((later, earlier));
            }
        }
    }
    inv
}

/// Weak (right Bruhat) order: `u <= v` iff `inv(u)` is contained in `inv(v)`.
pub fn weak_leq(u: &[u32], v: &[u32]) -> bool {
    inversions(u).is_subset(&inversions(v))
}

/// Level vectors `m_1, ..., m_k` of the leveled tree of a face. At level
/// `l` the leaves split into strands along all gaps of level `< l`; the
/// entry for a strand is one more than the number of its level-`l` gaps.
pub fn level_vectors(face: &Face) -> Vec<Vec<u32>> {
    let gaps = face.gap_levels();
    let k = face.num_blocks() as u32;
    let mut out = Vec::with_capacity(k as usize);
    for level in 1..=k {
        let mut vector = Vec::new();
        let mut count = 0u32;
        for &g in &gaps {
            if g < level {
                vector.push(count + 1);
                count = 0;
            } else if g == level {
                count += 1;
            }
        }
        vector.push(count + 1);
        out.push(vector);
    }
    out
}

/// Inverse of [`level_vectors`]: rebuild the face from level vectors,
/// grouping leaves bottom-up.
pub fn face_from_levels(levels: &[Vec<u32>]) -> Result<Face, PermutahedronError> {
    if levels.is_empty() {
        return Err(PermutahedronError::InvalidLevels("no levels".into()));
    }
    if levels[0].len() != 1 {
        return Err(PermutahedronError::InvalidLevels(format!(
            "level 1 must have one strand, got {}",
            levels[0].len()
        )));
    }
    for vec in levels {
        if vec.iter().any(|&e| e == 0) {
            return Err(PermutahedronError::InvalidLevels("zero entry".into()));
        }
    }
    for l in 1..levels.len() {
        let strands: u32 = levels[l - 1].iter().sum();
        if strands as usize != levels[l].len() {
            return Err(PermutahedronError::InvalidLevels(format!(
                "level {} has {} strands but level {} sums to {}",
                l + 1,
                levels[l].len(),
                l,
                strands
            )));
        }
    }
    let k = levels.len();
    fn expand(levels: &[Vec<u32>], level: usize, strand: usize) -> (u32, Vec<u32>) {
        // returns (leaf count, gap levels) of the subtree for `strand` at
        // `level` (0-based index into levels)
        let width = levels[level][strand] as usize;
        if level + 1 == levels.len() {
            return (width as u32, vec![level as u32 + 1; width - 1]);
        }
        // children strands at level+1 are consecutive; locate offset
        let offset: usize =
            levels[level][..strand].iter().map(|&w| w as usize).sum::<usize>();
        let mut leaves = 0;
        let mut gaps = Vec::new();
        for child in 0..width {
            if child > 0 {
                gaps.push(level as u32 + 1);
            }
            let (l, g) = expand(levels, level + 1, offset + child);
            // gaps of level `level+1` separate children; child-internal gaps
            // are strictly deeper
            let insert_at = gaps.len();
            gaps.splice(insert_at..insert_at, g);
            leaves += l;
        }
        (leaves, gaps)
    }
    let (total_leaves, gaps) = expand(levels, 0, 0);
    let n = total_leaves - 1;
    if gaps.len() as u32 != n {
        return Err(PermutahedronError::InvalidLevels("gap count mismatch".into()));
    }
    let mut blocks = vec![Vec::new(); k];
    for (i, &l) in gaps.iter().enumerate() {
        let value = n - i as u32; // gap g = i + 1 carries value n + 1 - g
        blocks[l as usize - 1].push(value);
    }
    if blocks.iter().any(Vec::is_empty) {
        return Err(PermutahedronError::InvalidLevels(
            "a level has no gap of its own".into(),
        ));
    }
    Face::new(blocks)
}

/// Leaf sequence of a codimension-one face: the strand widths at level
/// two, which for a two-level tree are the leaf counts per strand.
pub fn leaf_sequence(face: &Face) -> Option<Vec<u32>> {
    (face.num_blocks() == 2).then(|| level_vectors(face)[1].clone())
}

/// The codimension-one face `A_x | B_x` of `P_{m-1}` with leaf sequence
/// `x` (at least two parts, each positive, summing to `m`).
pub fn face_with_leaf_sequence(x: &[u32]) -> Result<Face, PermutahedronError> {
    if x.len() < 2 || x.iter().any(|&e| e == 0) {
        return Err(PermutahedronError::InvalidLevels(format!(
            "leaf sequence must have >= 2 positive parts, got {x:?}"
        )));
    }
    let m: u32 = x.iter().sum();
    let mut upper = Vec::new();
    let mut partial = 0;
    for &e in &x[..x.len() - 1] {
        partial += e;
        upper.push(m - partial);
    }
    let lower: Vec<u32> = (1..m).filter(|v| !upper.contains(v)).collect();
    Face::new(vec![upper, lower])
}

/// A face of the associahedron `K_n`: leaf intervals of the internal nodes
/// of a planar tree, always containing the root interval `(1, n)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KFace {
    leaves: u32,
    nodes: BTreeSet<(u32, u32)>,
}

impl KFace {
    pub fn corolla(leaves: u32) -> Self {
        let mut nodes = BTreeSet::new();
        nodes.insert((1, leaves));
        KFace { leaves, nodes }
    }

    pub fn new(leaves: u32, nodes: BTreeSet<(u32, u32)>) -> Result<Self, PermutahedronError> {
        if !nodes.contains(&(1, leaves)) {
            return Err(PermutahedronError::InvalidPartition(
                "missing root interval".into(),
            ));
        }
        for &(a, b) in &nodes {
            if a >= b || b > leaves || a == 0 {
                return Err(PermutahedronError::InvalidPartition(format!(
                    "bad interval ({a},{b})"
                )));
            }
            for &(c, d) in &nodes {
                let nested = (a <= c && d <= b) || (c <= a && b <= d);
                let disjoint = b < c || d < a;
                if !nested && !disjoint {
                    return Err(PermutahedronError::InvalidPartition(format!(
                        "intervals ({a},{b}) and ({c},{d}) cross"
                    )));
                }
            }
        }
        Ok(KFace { leaves, nodes })
    }

    pub fn leaves(&self) -> u32 {
        self.leaves
    }

    pub fn nodes(&self) -> &BTreeSet<(u32, u32)> {
        &self.nodes
    }

    pub fn dim(&self) -> usize {
        self.leaves as usize - 1 - self.nodes.len()
    }

    /// Codimension-one faces: insert one more bracket compatible with the
    /// existing nesting.
    pub fn boundary(&self) -> Vec<KFace> {
        let n = self.leaves;
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                if self.nodes.contains(&(a, b)) {
                    continue;
                }
                let compatible = self.nodes.iter().all(|&(c, d)| {
                    (a <= c && d <= b) || (c <= a && b <= d) || b < c || d < a
                });
                if compatible {
                    let mut nodes = self.nodes.clone();
                    nodes.insert((a, b));
                    out.push(KFace { leaves: n, nodes });
                }
            }
        }
        out
    }

    /// Direct children of the node spanning `(a, b)`: maximal proper
    /// sub-intervals, with unenclosed leaves as singletons.
    pub fn children(&self, span: (u32, u32)) -> Vec<(u32, u32)> {
        let (a, b) = span;
        let mut out = Vec::new();
        let mut cursor = a;
        while cursor <= b {
            let sub = self
                .nodes
                .iter()
                .filter(|&&(c, d)| c == cursor && (c, d) != (a, b) && d <= b)
                .max_by_key(|&&(_, d)| d);
            match sub {
                Some(&(c, d)) => {
                    out.push((c, d));
                    cursor = d + 1;
                }
                None => {
                    out.push((cursor, cursor));
                    cursor += 1;
                }
            }
        }
        out
    }
}

impl fmt::Display for KFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rec(kf: &KFace, span: (u32, u32), f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if span.0 == span.1 {
                return write!(f, "{}", span.0);
            }
            write!(f, "(")?;
            for child in kf.children(span) {
                rec(kf, child, f)?;
            }
            write!(f, ")")
        }
        rec(self, (1, self.leaves), f)
    }
}

impl fmt::Debug for KFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Tonks projection: forget levels. Returns `None` when the face is
/// degenerate, i.e. some level has two or more branching strands.
pub fn tonks(face: &Face) -> Option<KFace> {
    let gaps = face.gap_levels();
    let n = face.n();
    let k = face.num_blocks() as u32;
    let mut nodes = BTreeSet::new();
    for level in 1..=k {
        // strands at this level: runs between gaps of smaller level
        let mut start = 1u32; // leaf index
        let mut corollas = 0;
        let mut level_gaps = 0;
        for (i, &g) in gaps.iter().enumerate() {
            let gap_pos = i as u32 + 1; // between leaves gap_pos, gap_pos+1
            if g < level {
                if level_gaps > 0 {
                    nodes.insert((start, gap_pos));
                    corollas += 1;
                }
                start = gap_pos + 1;
                level_gaps = 0;
            } else if g == level {
                level_gaps += 1;
            }
        }
        if level_gaps > 0 {
            nodes.insert((start, n + 1));
            corollas += 1;
        }
        if corollas != 1 {
            return None;
        }
    }
    Some(KFace::new(n + 1, nodes).expect("nested by construction"))
}
