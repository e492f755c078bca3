//! Permutations of `{1, ..., d}` and enumeration of conjugacy classes.
//!
//! Images are stored 0-based; cycle notation is 1-based.

use std::fmt;
use std::str::FromStr;

use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermError {
    #[error("images do not form a bijection on 0..{0}")]
    NotBijective(usize),
    #[error("cycle type has degree {found}, expected {expected}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("bad cycle notation: {0}")]
    Syntax(String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(PermError::NotBijective(n));
            }
        }
        Ok(Self { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::new(images.clone()).is_ok());
        Self { images }
    }

    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree as u32).collect(),
        }
    }

    /// Canonical representative of a cycle type: consecutive cycles
    /// `(1 .. a1)(a1+1 .. a1+a2)...` in non-increasing part order.
    pub fn canonical(cycle_type: &Partition) -> Self {
        let mut images = Vec::with_capacity(cycle_type.degree() as usize);
        let mut start = 0u32;
        for &len in cycle_type.parts() {
            for j in 0..len {
                images.push(start + (j + 1) % len);
            }
            start += len;
        }
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.images[i as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Self { images }
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            images: self
                .images
                .iter()
                .map(|&i| next.images[i as usize])
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn cycle_type(&self) -> Partition {
        Partition::new(cycle_lengths(&self.images)).expect("nonempty permutation")
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        cycle_lengths(&self.images).len()
    }

    /// `d - (number of cycles)`: the minimal number of transpositions.
    pub fn length(&self) -> usize {
        self.degree() - self.cycle_count()
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i as u32);
                i = self.images[i] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// One-line cycle notation with fixed points omitted, e.g. `(1 2)(3 4)`.
    /// The identity prints as `()`.
    pub fn to_cycle_notation(&self) -> String {
        let mut s = String::new();
        for c in self.cycles().into_iter().filter(|c| c.len() > 1) {
            s.push('(');
            for (j, x) in c.iter().enumerate() {
                if j > 0 {
                    s.push(' ');
                }
                s.push_str(&(x + 1).to_string());
            }
            s.push(')');
        }
        if s.is_empty() {
            s.push_str("()");
        }
        s
    }

    /// Parses cycle notation on `{1, ..., degree}`.
    pub fn from_cycle_notation(text: &str, degree: usize) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut moved = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| PermError::Syntax(format!("expected '(' in {text:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| PermError::Syntax(format!("unclosed cycle in {text:?}")))?;
            let points: Vec<u32> = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u32>()
                        .ok()
                        .filter(|&v| v >= 1 && v as usize <= degree)
                        .ok_or_else(|| PermError::Syntax(format!("bad point {t:?}")))
                })
                .collect::<Result<_, _>>()?;
            for (j, &x) in points.iter().enumerate() {
                let idx = (x - 1) as usize;
                if std::mem::replace(&mut moved[idx], true) {
                    return Err(PermError::Syntax(format!("point {x} repeated")));
                }
                images[idx] = points[(j + 1) % points.len()] - 1;
            }
            rest = body[close + 1..].trim_start();
        }
        Ok(Self { images })
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_notation())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_notation())
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// Degree is the largest point mentioned.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let degree = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        Self::from_cycle_notation(s, degree)
    }
}

pub(crate) fn cycle_lengths(images: &[u32]) -> Vec<u32> {
    let n = images.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = images[i] as usize;
        }
        out.push(len);
    }
    out
}

/// `d! / prod(part^m * m!)`, the size of the conjugacy class of a cycle type.
pub fn class_size(cycle_type: &Partition) -> u128 {
    let mut size: u128 = (1..=cycle_type.degree() as u128).product();
    for (part, m) in cycle_type.multiplicities() {
        size /= (part as u128).pow(m as u32);
        size /= (1..=m as u128).product::<u128>();
    }
    size
}

/// Number of permutations on `n` points whose cycle lengths are given by
/// `counts[len]` (a multiset of lengths summing to `n`).
fn arrangements(counts: &[u32]) -> u128 {
    let n: u32 = counts.iter().enumerate().map(|(l, &c)| l as u32 * c).sum();
    let mut size: u128 = (1..=n as u128).product();
    for (len, &m) in counts.iter().enumerate().skip(1) {
        size /= (len as u128).pow(m);
        size /= (1..=m as u128).product::<u128>();
    }
    size
}

/// Each permutation with the given cycle type, exactly once.
pub fn enumerate_class(degree: u32, cycle_type: &Partition) -> Result<ClassStream, PermError> {
    if cycle_type.degree() != degree {
        return Err(PermError::DegreeMismatch {
            expected: degree,
            found: cycle_type.degree(),
        });
    }
    Ok(ClassStream {
        walker: ClassWalker::new(cycle_type, None),
    })
}

/// Iterator over a conjugacy class; clones each member.
pub struct ClassStream {
    walker: ClassWalker,
}

impl Iterator for ClassStream {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        self.walker
            .advance()
            .map(|img| Permutation::from_images_unchecked(img.to_vec()))
    }
}

/// The first two decisions of the class walk: the length of the cycle through
/// point 0 and the image of 0. Chunks partition the class and appear in walk
/// order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassChunk {
    pub length: u32,
    pub image: u32,
    /// Number of class members in this chunk.
    pub size: u128,
}

/// Splits a class into disjoint chunks in the same order as a full walk.
pub fn class_chunks(cycle_type: &Partition) -> Vec<ClassChunk> {
    let d = cycle_type.degree();
    let mut counts = vec![0u32; d as usize + 1];
    for &p in cycle_type.parts() {
        counts[p as usize] += 1;
    }
    let mut out = Vec::new();
    for len in (1..=d).rev() {
        if counts[len as usize] == 0 {
            continue;
        }
        counts[len as usize] -= 1;
        let rest = arrangements(&counts);
        if len == 1 {
            out.push(ClassChunk {
                length: 1,
                image: 0,
                size: rest,
            });
        } else {
            // choose the remaining len - 2 cycle points in order from d - 2
            let ordered: u128 = ((d - len + 1)..=(d - 2)).map(|x| x as u128).product();
            for image in 1..d {
                out.push(ClassChunk {
                    length: len,
                    image,
                    size: ordered * rest,
                });
            }
        }
        counts[len as usize] += 1;
    }
    out
}

#[derive(Clone, Copy)]
enum Frame {
    /// Choosing the length of the cycle starting at `start`.
    Length { start: u32, choice: usize },
    /// Choosing the next point of the cycle being built.
    Point { candidate: u32 },
}

/// Depth-first walk over a conjugacy class with an explicit stack.
///
/// Each cycle begins at the smallest unused point; its length is chosen among
/// the remaining lengths (largest first), then its points in increasing
/// order. Every class member is visited exactly once.
pub struct ClassWalker {
    d: u32,
    /// Distinct lengths, descending.
    lengths: Vec<u32>,
    remaining: Vec<u32>,
    images: Vec<u32>,
    used: Vec<bool>,
    /// Points of the cycle under construction.
    cycle: Vec<u32>,
    cycle_len: u32,
    stack: Vec<Frame>,
    /// Number of frames belonging to a fixed chunk prefix; never popped.
    floor: usize,
    started: bool,
    done: bool,
}

impl ClassWalker {
    /// Walks the whole class, or only `chunk` when given.
    pub fn new(cycle_type: &Partition, chunk: Option<ClassChunk>) -> Self {
        let d = cycle_type.degree();
        let mult = cycle_type.multiplicities();
        let mut w = Self {
            d,
            lengths: mult.iter().map(|(v, _)| *v).collect(),
            remaining: mult.iter().map(|(_, c)| *c as u32).collect(),
            images: vec![u32::MAX; d as usize],
            used: vec![false; d as usize],
            cycle: Vec::with_capacity(d as usize),
            cycle_len: 0,
            stack: Vec::with_capacity(2 * d as usize),
            floor: 0,
            started: false,
            done: false,
        };
        if let Some(c) = chunk {
            let choice = w
                .lengths
                .iter()
                .position(|&l| l == c.length)
                .expect("chunk length belongs to the cycle type");
            w.remaining[choice] -= 1;
            w.used[0] = true;
            w.cycle.push(0);
            w.cycle_len = c.length;
            w.stack.push(Frame::Length { start: 0, choice });
            if c.length == 1 {
                w.close_cycle();
            } else {
                w.used[c.image as usize] = true;
                w.cycle.push(c.image);
                w.stack.push(Frame::Point { candidate: c.image });
                if c.length == 2 {
                    w.close_cycle();
                }
            }
            w.floor = w.stack.len();
        }
        w
    }

    fn close_cycle(&mut self) {
        let n = self.cycle.len();
        for j in 0..n {
            self.images[self.cycle[j] as usize] = self.cycle[(j + 1) % n];
        }
        self.cycle.clear();
        self.cycle_len = 0;
    }

    fn first_unused(&self) -> Option<u32> {
        self.used.iter().position(|u| !u).map(|i| i as u32)
    }

    /// Undoes the effect of the top frame; returns it.
    fn undo_top(&mut self) -> Frame {
        // An empty open cycle means the top frame closed the previous one.
        if self.cycle.is_empty() {
            self.reopen_last_cycle();
        }
        let frame = self.stack.pop().expect("nonempty stack");
        match frame {
            Frame::Length { choice, .. } => {
                let start = self.cycle.pop().expect("cycle start");
                self.used[start as usize] = false;
                self.remaining[choice] += 1;
                self.cycle_len = 0;
            }
            Frame::Point { candidate } => {
                let p = self.cycle.pop().expect("cycle point");
                debug_assert_eq!(p, candidate);
                self.used[p as usize] = false;
            }
        }
        frame
    }

    /// Rebuilds `cycle` from the stack after the last cycle was closed.
    fn reopen_last_cycle(&mut self) {
        let j = self
            .stack
            .iter()
            .rposition(|f| matches!(f, Frame::Length { .. }))
            .expect("a closed cycle has a length frame");
        let Frame::Length { start, choice } = self.stack[j] else {
            unreachable!()
        };
        self.cycle.clear();
        self.cycle.push(start);
        for f in &self.stack[j + 1..] {
            if let Frame::Point { candidate } = f {
                self.cycle.push(*candidate);
            }
        }
        self.cycle_len = self.lengths[choice];
        for &p in &self.cycle {
            self.images[p as usize] = u32::MAX;
        }
    }

    /// Completes the current partial state with the first available choices.
    fn descend(&mut self) -> bool {
        loop {
            if self.cycle.is_empty() {
                match self.first_unused() {
                    None => return true,
                    Some(start) => {
                        if !self.push_length(start, 0) {
                            return false;
                        }
                    }
                }
            } else if !self.push_point(0) {
                return false;
            }
        }
    }

    fn push_length(&mut self, start: u32, from: usize) -> bool {
        for choice in from..self.lengths.len() {
            if self.remaining[choice] == 0 {
                continue;
            }
            self.remaining[choice] -= 1;
            self.used[start as usize] = true;
            self.cycle.push(start);
            self.cycle_len = self.lengths[choice];
            self.stack.push(Frame::Length { start, choice });
            if self.cycle_len == 1 {
                self.close_cycle();
            }
            return true;
        }
        false
    }

    fn push_point(&mut self, from: u32) -> bool {
        for c in from..self.d {
            if self.used[c as usize] {
                continue;
            }
            self.used[c as usize] = true;
            self.cycle.push(c);
            self.stack.push(Frame::Point { candidate: c });
            if self.cycle.len() as u32 == self.cycle_len {
                self.close_cycle();
            }
            return true;
        }
        false
    }

    /// Moves to the next class member and returns its images.
    pub fn advance(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.descend() {
                return Some(&self.images);
            }
        }
        // backtrack until some frame has a later sibling that completes
        loop {
            if self.stack.len() <= self.floor {
                self.done = true;
                return None;
            }
            let frame = self.undo_top();
            let moved = match frame {
                Frame::Length { start, choice } => self.push_length(start, choice + 1),
                Frame::Point { candidate } => self.push_point(candidate + 1),
            };
            if moved && self.descend() {
                return Some(&self.images);
            }
        }
    }
}
