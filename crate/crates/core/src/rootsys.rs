//! Root systems, weights and the Weyl-group combinatorics used by the
//! constant-term pipeline.
//!
//! Conventions: Bourbaki node numbering, Cartan matrix
//! `A[i][j] = <alpha_j, alpha_i^vee>`, weights in fundamental-weight
//! coordinates (`coords[i] = <lambda, alpha_i^vee>`). Node indices in the
//! public API are 1-based, matching the Bourbaki labels; internal storage
//! is 0-based.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = Rational64;

/// Dynkin type of an irreducible finite crystallographic root system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeLabel {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl TypeLabel {
    pub fn rank(self) -> usize {
        match self {
            TypeLabel::A(n) | TypeLabel::B(n) | TypeLabel::C(n) | TypeLabel::D(n) => n,
            TypeLabel::E6 => 6,
            TypeLabel::E7 => 7,
            TypeLabel::E8 => 8,
            TypeLabel::F4 => 4,
            TypeLabel::G2 => 2,
        }
    }

    /// Degrees of the basic invariants; their product is `|W|`.
    pub fn degrees(self) -> Vec<u128> {
        match self {
            TypeLabel::A(n) => (2..=n as u128 + 1).collect(),
            TypeLabel::B(n) | TypeLabel::C(n) => (1..=n as u128).map(|i| 2 * i).collect(),
            TypeLabel::D(n) => {
                let mut d: Vec<u128> = (1..n as u128).map(|i| 2 * i).collect();
                d.push(n as u128);
                d
            }
            TypeLabel::E6 => vec![2, 5, 6, 8, 9, 12],
            TypeLabel::E7 => vec![2, 6, 8, 10, 12, 14, 18],
            TypeLabel::E8 => vec![2, 8, 12, 14, 18, 20, 24, 30],
            TypeLabel::F4 => vec![2, 6, 8, 12],
            TypeLabel::G2 => vec![2, 6],
        }
    }

    fn cartan_matrix(self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i - 1][j - 1] = -1;
            a[j - 1][i - 1] = -1;
        };
        match self {
            TypeLabel::A(n) | TypeLabel::B(n) | TypeLabel::C(n) => {
                for i in 1..n {
                    link(i, i + 1);
                }
            }
            TypeLabel::D(n) => {
                for i in 1..n - 1 {
                    link(i, i + 1);
                }
                link(n - 2, n);
            }
            TypeLabel::E6 | TypeLabel::E7 | TypeLabel::E8 => {
                link(1, 3);
                link(2, 4);
                for i in 3..n {
                    link(i, i + 1);
                }
            }
            TypeLabel::F4 => {
                link(1, 2);
                link(2, 3);
                link(3, 4);
            }
            TypeLabel::G2 => link(1, 2),
        }
        // Double and triple bonds. A[i][j] = <alpha_j, alpha_i^vee>, so the
        // row of the short root carries the large entry.
        match self {
            TypeLabel::B(n) => a[n - 1][n - 2] = -2,
            TypeLabel::C(n) => a[n - 2][n - 1] = -2,
            TypeLabel::F4 => a[2][1] = -2,
            TypeLabel::G2 => a[0][1] = -3,
            _ => {}
        }
        a
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::A(n) => write!(f, "A{n}"),
            TypeLabel::B(n) => write!(f, "B{n}"),
            TypeLabel::C(n) => write!(f, "C{n}"),
            TypeLabel::D(n) => write!(f, "D{n}"),
            TypeLabel::E6 => write!(f, "E6"),
            TypeLabel::E7 => write!(f, "E7"),
            TypeLabel::E8 => write!(f, "E8"),
            TypeLabel::F4 => write!(f, "F4"),
            TypeLabel::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for TypeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('_', "");
        let unknown = || Error::UnknownType(s.to_string());
        let mut chars = t.chars();
        let letter = chars.next().ok_or_else(unknown)?.to_ascii_uppercase();
        let n: usize = chars.as_str().parse().map_err(|_| unknown())?;
        let label = match (letter, n) {
            ('A', n) if n >= 1 => TypeLabel::A(n),
            ('B', n) if n >= 2 => TypeLabel::B(n),
            ('C', n) if n >= 2 => TypeLabel::C(n),
            ('D', n) if n >= 4 => TypeLabel::D(n),
            ('E', 6) => TypeLabel::E6,
            ('E', 7) => TypeLabel::E7,
            ('E', 8) => TypeLabel::E8,
            ('F', 4) => TypeLabel::F4,
            ('G', 2) => TypeLabel::G2,
            _ => return Err(unknown()),
        };
        Ok(label)
    }
}

/// A weight in fundamental-weight coordinates, with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(Vec<Q>);

impl Weight {
    pub fn new(coords: Vec<Q>) -> Self {
        Weight(coords)
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        Weight(coords.into_iter().map(Q::from_integer).collect())
    }

    pub fn zero(rank: usize) -> Self {
        Weight(vec![Q::zero(); rank])
    }

    /// Half the sum of the positive roots: all coordinates equal to one.
    pub fn rho(rank: usize) -> Self {
        Weight(vec![Q::one(); rank])
    }

    /// Fundamental weight of the 1-based node `node`.
    pub fn fundamental(rank: usize, node: usize) -> Self {
        let mut w = Weight::zero(rank);
        w.0[node - 1] = Q::one();
        w
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: Q) -> Weight {
        Weight(self.0.iter().map(|a| a * c).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Position of a weight relative to the negative obtuse cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// Every simple-root coordinate is negative.
    StrictInterior,
    /// No coordinate is positive but at least one vanishes.
    Boundary,
    /// Some coordinate is positive.
    Outside,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::StrictInterior => "strict_interior",
            Region::Boundary => "boundary",
            Region::Outside => "outside",
        })
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "strict_interior" => Ok(Region::StrictInterior),
            "boundary" => Ok(Region::Boundary),
            "outside" => Ok(Region::Outside),
            _ => Err(Error::Parse(format!("bad region {s:?}"))),
        }
    }
}

/// One representative `w` of `W / W_M` with its images and inversion data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetElement {
    /// Reduced word `s_{word[0]} s_{word[1]} ...` (1-based nodes).
    pub word: Vec<u8>,
    pub image_l1: Weight,
    pub image_l2: Weight,
    /// `(<l1, alpha^vee>, <l2, alpha^vee>)` for each positive `alpha` with
    /// `w alpha < 0`.
    pub inversions: Vec<(i64, i64)>,
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub type_label: TypeLabel,
    pub rank: usize,
    pub cartan_matrix: Vec<Vec<i64>>,
    /// Positive roots in simple-root coordinates, sorted by height then
    /// lexicographically.
    pub positive_roots: Vec<Vec<i64>>,
    /// Coroot of each positive root in simple-coroot coordinates.
    pub positive_coroots: Vec<Vec<i64>>,
    pub coroot_heights: Vec<i64>,
    pub inverse_cartan: Vec<Vec<Q>>,
    /// `(alpha_i, alpha_i) / 2`, normalized so short roots have 1.
    pub half_lengths: Vec<i64>,
}

/// Parse a type label such as `"E6"` or `"A_3"` and build its root system.
pub fn build_root_system(type_label: &str) -> Result<RootSystem> {
    Ok(RootSystem::new(type_label.parse()?))
}

impl RootSystem {
    pub fn new(type_label: TypeLabel) -> Self {
        let cartan_matrix = type_label.cartan_matrix();
        let rank = cartan_matrix.len();
        let half_lengths = symmetrizer(&cartan_matrix);
        let positive_roots = generate_positive_roots(&cartan_matrix);

        let positive_coroots: Vec<Vec<i64>> = positive_roots
            .iter()
            .map(|c| {
                let norm2: i64 = (0..rank)
                    .flat_map(|i| (0..rank).map(move |j| (i, j)))
                    .map(|(i, j)| c[i] * c[j] * half_lengths[i] * cartan_matrix[i][j])
                    .sum();
                c.iter()
                    .zip(&half_lengths)
                    .map(|(ci, di)| {
                        let num = 2 * ci * di;
                        debug_assert_eq!(num % norm2, 0);
                        num / norm2
                    })
                    .collect()
            })
            .collect();
        let coroot_heights = positive_coroots.iter().map(|n| n.iter().sum()).collect();
        let inverse_cartan = invert(&cartan_matrix);

        RootSystem {
            type_label,
            rank,
            cartan_matrix,
            positive_roots,
            positive_coroots,
            coroot_heights,
            inverse_cartan,
            half_lengths,
        }
    }

    fn check_node(&self, node: usize) -> Result<usize> {
        if node == 0 || node > self.rank {
            return Err(Error::IndexOutOfRange { index: node, rank: self.rank });
        }
        Ok(node - 1)
    }

    fn check_rank(&self, w: &Weight) -> Result<()> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: w.rank() });
        }
        Ok(())
    }

    /// `<w, alpha^vee>` for the positive coroot with the given index.
    pub fn pair(&self, w: &Weight, coroot_index: usize) -> Result<Q> {
        let coroot = self
            .positive_coroots
            .get(coroot_index)
            .ok_or(Error::IndexOutOfRange { index: coroot_index, rank: self.positive_coroots.len() })?;
        self.check_rank(w)?;
        Ok(coroot
            .iter()
            .zip(w.coords())
            .map(|(n, c)| c * Q::from_integer(*n))
            .sum())
    }

    /// Index of the simple coroot of a 1-based node in `positive_coroots`.
    pub fn simple_index(&self, node: usize) -> Result<usize> {
        let i = self.check_node(node)?;
        Ok(self
            .positive_roots
            .iter()
            .position(|r| r.iter().enumerate().all(|(k, &c)| c == i64::from(k == i)))
            .expect("simple roots are positive roots"))
    }

    /// Index of the highest root (last in height order).
    pub fn highest_root_index(&self) -> usize {
        self.positive_roots.len() - 1
    }

    /// Simple root `alpha_i` in fundamental-weight coordinates (column i).
    pub fn simple_root_weight(&self, node: usize) -> Result<Weight> {
        let i = self.check_node(node)?;
        Ok(Weight::from_ints(self.cartan_matrix.iter().map(|row| row[i])))
    }

    pub fn simple_reflect(&self, node: usize, w: &Weight) -> Result<Weight> {
        let i = self.check_node(node)?;
        self.check_rank(w)?;
        Ok(self.reflect0(i, w))
    }

    fn reflect0(&self, i: usize, w: &Weight) -> Weight {
        let c = w.0[i];
        Weight(
            w.0.iter()
                .zip(&self.cartan_matrix)
                .map(|(x, row)| x - c * Q::from_integer(row[i]))
                .collect(),
        )
    }

    /// Applies `s_{word[0]} s_{word[1]} ... s_{word[m-1]}` to `w`
    /// (the last letter acts first).
    pub fn apply_word(&self, word: &[u8], w: &Weight) -> Result<Weight> {
        self.check_rank(w)?;
        let mut out = w.clone();
        for &node in word.iter().rev() {
            let i = self.check_node(node as usize)?;
            out = self.reflect0(i, &out);
        }
        Ok(out)
    }

    /// Dominant Weyl translate of `w` and a word `u` with `u w` dominant.
    ///
    /// Reflects at the most negative coordinate, ties going to the lowest
    /// node.
    pub fn dominant_representative(&self, w: &Weight) -> Result<(Weight, Vec<u8>)> {
        self.check_rank(w)?;
        let mut cur = w.clone();
        let mut steps = Vec::new();
        loop {
            let mut pick: Option<usize> = None;
            for (i, c) in cur.0.iter().enumerate() {
                if c.is_negative() && pick.is_none_or(|p| *c < cur.0[p]) {
                    pick = Some(i);
                }
            }
            match pick {
                None => break,
                Some(i) => {
                    cur = self.reflect0(i, &cur);
                    steps.push(i as u8 + 1);
                }
            }
        }
        steps.reverse();
        Ok((cur, steps))
    }

    /// Simple-root coordinates `A^{-1} coords` of a weight.
    pub fn root_coordinates(&self, w: &Weight) -> Vec<Q> {
        self.inverse_cartan
            .iter()
            .map(|row| row.iter().zip(w.coords()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn langlands_classify(&self, mu: &Weight) -> Region {
        let b = self.root_coordinates(mu);
        if b.iter().any(|x| x.is_positive()) {
            Region::Outside
        } else if b.iter().all(|x| x.is_negative()) {
            Region::StrictInterior
        } else {
            Region::Boundary
        }
    }

    /// The W-invariant form, normalized so short roots have squared
    /// length 2.
    pub fn inner_product(&self, a: &Weight, b: &Weight) -> Q {
        self.root_coordinates(a)
            .iter()
            .zip(&self.half_lengths)
            .zip(b.coords())
            .map(|((x, d), y)| x * Q::from_integer(*d) * y)
            .sum()
    }

    pub fn weyl_group_order(&self) -> u128 {
        self.type_label.degrees().iter().product()
    }

    /// Order of the parabolic subgroup generated by `s_i`, `i != node`,
    /// counted by enumerating the free orbit of `rho` under it.
    pub fn levi_weyl_order(&self, node: usize) -> Result<u128> {
        let j = self.check_node(node)?;
        let gens: Vec<usize> = (0..self.rank).filter(|&i| i != j).collect();
        Ok(self.orbit_size(&vec![1; self.rank], &gens))
    }

    /// Size of the orbit of a dominant integral weight under the subgroup
    /// generated by the listed (0-based) simple reflections.
    fn orbit_size(&self, start: &[i64], gens: &[usize]) -> u128 {
        let mut count = 0u128;
        let mut stack = vec![start.to_vec()];
        while let Some(mu) = stack.pop() {
            count += 1;
            for &i in gens {
                if mu[i] <= 0 {
                    continue;
                }
                let child = reflect_ints(&self.cartan_matrix, i, &mu);
                if gens.iter().take_while(|&&g| g < i).all(|&g| child[g] >= 0) {
                    stack.push(child);
                }
            }
        }
        count
    }

    /// Reflects a root given in simple-root coordinates.
    pub fn reflect_root(&self, node: usize, root: &[i64]) -> Result<Vec<i64>> {
        let i = self.check_node(node)?;
        let pairing: i64 = (0..self.rank).map(|k| root[k] * self.cartan_matrix[i][k]).sum();
        let mut out = root.to_vec();
        out[i] -= pairing;
        Ok(out)
    }

    /// Indices of the positive roots sent to negative roots by the element
    /// with the given word, found by applying it to every positive root.
    pub fn inversion_set_by_application(&self, word: &[u8]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (idx, root) in self.positive_roots.iter().enumerate() {
            let mut r = root.clone();
            for &node in word.iter().rev() {
                r = self.reflect_root(node as usize, &r)?;
            }
            if r.iter().any(|&c| c < 0) {
                out.push(idx);
            }
        }
        Ok(out)
    }

    /// Visits `W_rel` for the line `(l1, omega_j)` as a tree over the orbit
    /// of `omega_j`: the parent of an orbit element is obtained by
    /// reflecting at its lowest negative coordinate, so every element is
    /// reached exactly once along its lexicographically first reduced word.
    ///
    /// The visitor receives `(word, w l1, w omega_j, new inversion pair)`
    /// where the pair is `None` for the identity.
    pub(crate) fn visit_wrel<F>(&self, node: usize, l1: &[i64], mut visit: F) -> Result<()>
    where
        F: FnMut(&WrelNode<'_>),
    {
        let j = self.check_node(node)?;
        let mut omega = vec![0i64; self.rank];
        omega[j] = 1;
        struct Frame {
            mu: Vec<i64>,
            img: Vec<i64>,
            depth: usize,
            letter: u8,
            pair: Option<(i64, i64)>,
        }
        // Depth-first; `word` and `pairs` hold the path from the root.
        let mut word_rev: Vec<u8> = Vec::new();
        let mut pairs: Vec<(i64, i64)> = Vec::new();
        let mut stack = vec![Frame { mu: omega, img: l1.to_vec(), depth: 0, letter: 0, pair: None }];
        while let Some(f) = stack.pop() {
            word_rev.truncate(f.depth.saturating_sub(1));
            pairs.truncate(f.depth.saturating_sub(1));
            if let Some(p) = f.pair {
                word_rev.push(f.letter);
                pairs.push(p);
            }
            visit(&WrelNode { word_rev: &word_rev, image_l1: &f.img, image_l2: &f.mu, inversions: &pairs });
            for i in (0..self.rank).rev() {
                if f.mu[i] <= 0 {
                    continue;
                }
                let child = reflect_ints(&self.cartan_matrix, i, &f.mu);
                if child[..i].iter().any(|&c| c < 0) {
                    continue;
                }
                let img = reflect_ints(&self.cartan_matrix, i, &f.img);
                stack.push(Frame {
                    pair: Some((f.img[i], f.mu[i])),
                    mu: child,
                    img,
                    depth: f.depth + 1,
                    letter: i as u8 + 1,
                });
            }
        }
        Ok(())
    }

    fn line_ints(&self, node: usize, l1: &Weight, l2: &Weight) -> Result<Vec<i64>> {
        self.check_node(node)?;
        self.check_rank(l1)?;
        self.check_rank(l2)?;
        if *l2 != Weight::fundamental(self.rank, node) {
            return Err(Error::NotFundamentalDirection(node));
        }
        l1.to_ints()
            .ok_or_else(|| Error::NonIntegralLine(format!("lambda1 = {l1} has non-integral coroot pairings")))
    }

    /// All `w` with `w alpha_i > 0` for every `i != node`, with images and
    /// inversion data, sorted by reduced word.
    pub fn enumerate_wrel(&self, node: usize, l1: &Weight, l2: &Weight) -> Result<Vec<CosetElement>> {
        let l1i = self.line_ints(node, l1, l2)?;
        let mut out = Vec::new();
        self.visit_wrel(node, &l1i, |n| {
            out.push(CosetElement {
                word: n.word(),
                image_l1: Weight::from_ints(n.image_l1.iter().copied()),
                image_l2: Weight::from_ints(n.image_l2.iter().copied()),
                inversions: n.inversions.to_vec(),
            })
        })?;
        out.sort_by(|a, b| a.word.cmp(&b.word));
        Ok(out)
    }

    /// Images `w l1` for all `w` in `W_rel`, without words or inversions.
    pub fn wrel_images(&self, node: usize, l1: &Weight, l2: &Weight) -> Result<Vec<Vec<i64>>> {
        let l1i = self.line_ints(node, l1, l2)?;
        let mut out = Vec::new();
        self.visit_wrel(node, &l1i, |n| out.push(n.image_l1.to_vec()))?;
        Ok(out)
    }
}

pub(crate) struct WrelNode<'a> {
    word_rev: &'a [u8],
    pub image_l1: &'a [i64],
    pub image_l2: &'a [i64],
    pub inversions: &'a [(i64, i64)],
}

impl WrelNode<'_> {
    pub fn word(&self) -> Vec<u8> {
        self.word_rev.iter().rev().copied().collect()
    }
}

fn reflect_ints(cartan: &[Vec<i64>], i: usize, w: &[i64]) -> Vec<i64> {
    let c = w[i];
    w.iter().zip(cartan).map(|(x, row)| x - c * row[i]).collect()
}

/// Positive roots by closure of the simple roots under simple reflections.
fn generate_positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = cartan.len();
    let mut roots: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|k| i64::from(k == i)).collect())
        .collect();
    let mut seen: std::collections::HashSet<Vec<i64>> = roots.iter().cloned().collect();
    let mut frontier = roots.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for r in &frontier {
            for i in 0..n {
                let pairing: i64 = (0..n).map(|k| r[k] * cartan[i][k]).sum();
                let mut s = r.clone();
                s[i] -= pairing;
                // s_i permutes the positive roots other than alpha_i.
                if s.iter().all(|&c| c >= 0) && s.iter().any(|&c| c > 0) && seen.insert(s.clone()) {
                    next.push(s);
                }
            }
        }
        roots.extend(next.iter().cloned());
        frontier = next;
    }
    roots.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    roots
}

/// Smallest positive `d` with `d_i A[i][j] = d_j A[j][i]`.
fn symmetrizer(cartan: &[Vec<i64>]) -> Vec<i64> {
    let n = cartan.len();
    let mut d: Vec<Option<Q>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Q::one());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let di = d[i].unwrap();
            for j in 0..n {
                if i != j && cartan[i][j] != 0 && d[j].is_none() {
                    d[j] = Some(di * Q::new(cartan[i][j], cartan[j][i]));
                    stack.push(j);
                }
            }
        }
    }
    let d: Vec<Q> = d.into_iter().map(Option::unwrap).collect();
    let min = d.iter().copied().min().unwrap();
    let scaled: Vec<Q> = d.iter().map(|x| x / min).collect();
    let lcm = scaled.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
    scaled.iter().map(|x| (x * Q::from_integer(lcm)).to_integer()).collect()
}

fn invert(a: &[Vec<i64>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|&x| Q::from_integer(x))
                .chain((0..n).map(|k| if k == i { Q::one() } else { Q::zero() }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).expect("Cartan matrix is invertible");
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for k in 0..2 * n {
                    let v = m[col][k];
                    m[r][k] -= f * v;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n..].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Weight {
        Weight::from_ints(v.iter().copied())
    }

    #[test]
    fn positive_root_counts() {
        for (label, count) in [
            ("A1", 1),
            ("A2", 3),
            ("B2", 4),
            ("G2", 6),
            ("B3", 9),
            ("C3", 9),
            ("D4", 12),
            ("E6", 36),
            ("E7", 63),
            ("E8", 120),
            ("F4", 24),
        ] {
            let rs = build_root_system(label).unwrap();
            assert_eq!(rs.positive_roots.len(), count, "{label}");
        }
        let a1 = build_root_system("A1").unwrap();
        assert_eq!(a1.cartan_matrix, vec![vec![2]]);
    }

    #[test]
    fn unknown_type_names_supported_types() {
        let err = build_root_system("H3").unwrap_err();
        assert!(err.to_string().contains("E8"));
        assert!(build_root_system("D3").is_err());
    }

    #[test]
    fn f4_has_two_root_lengths() {
        let rs = build_root_system("F4").unwrap();
        assert_eq!(rs.half_lengths, vec![2, 2, 1, 1]);
        let mut heights: Vec<i64> = rs.coroot_heights.clone();
        heights.sort();
        heights.dedup();
        assert_eq!(*heights.last().unwrap(), 11);
    }

    #[test]
    fn inverse_cartan_is_exact() {
        for label in ["E8", "F4", "G2", "B4", "C5", "D6"] {
            let rs = build_root_system(label).unwrap();
            let n = rs.rank;
            for i in 0..n {
                for j in 0..n {
                    let s: Q = (0..n).map(|k| rs.inverse_cartan[i][k] * Q::from_integer(rs.cartan_matrix[k][j])).sum();
                    assert_eq!(s, if i == j { Q::one() } else { Q::zero() });
                }
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let rs = build_root_system("E8").unwrap();
        let rho = Weight::rho(8);
        assert_eq!(rs.pair(&rho, rs.highest_root_index()).unwrap(), Q::from_integer(29));
        for i in 1..=8 {
            for j in 1..=8 {
                let v = rs.pair(&Weight::fundamental(8, i), rs.simple_index(j).unwrap()).unwrap();
                assert_eq!(v, Q::from_integer(i64::from(i == j)));
            }
        }
        // 2s omega_j - rho on simple coroots.
        let s = Q::new(5, 2);
        let l = Weight::fundamental(8, 3).scale(s * 2).sub(&rho);
        for i in 1..=8 {
            let v = rs.pair(&l, rs.simple_index(i).unwrap()).unwrap();
            assert_eq!(v, if i == 3 { s * 2 - 1 } else { -Q::one() });
        }
        assert!(rs.pair(&rho, 120).is_err());
    }

    #[test]
    fn simple_reflect_examples() {
        let a1 = build_root_system("A1").unwrap();
        assert_eq!(a1.simple_reflect(1, &Weight::rho(1)).unwrap(), ints(&[-1]));
        let e6 = build_root_system("E6").unwrap();
        let w = ints(&[-1, 4, -1, -1, -1, -1]);
        let r = e6.simple_reflect(2, &w).unwrap();
        assert_eq!(r, ints(&[-1, -4, -1, 3, -1, -1]));
        assert_eq!(e6.simple_reflect(2, &r).unwrap(), w);
    }

    #[test]
    fn dominant_representative_examples() {
        let e6 = build_root_system("E6").unwrap();
        let rho = Weight::rho(6);
        let (d, word) = e6.dominant_representative(&rho).unwrap();
        assert_eq!(d, rho);
        assert!(word.is_empty());
        let neg = rho.scale(-Q::one());
        let (d, word) = e6.dominant_representative(&neg).unwrap();
        assert_eq!(d, rho);
        assert_eq!(e6.apply_word(&word, &neg).unwrap(), rho);
        let l1 = ints(&[-1, 4, -1, -1, -1, -1]);
        let (d, word) = e6.dominant_representative(&l1).unwrap();
        assert_eq!(d, ints(&[1, 0, 0, 1, 0, 1]));
        assert_eq!(e6.apply_word(&word, &l1).unwrap(), d);
    }

    #[test]
    fn langlands_examples() {
        let rs = build_root_system("F4").unwrap();
        let rho = Weight::rho(4);
        assert_eq!(rs.langlands_classify(&rho.scale(-Q::one())), Region::StrictInterior);
        assert_eq!(rs.langlands_classify(&rho), Region::Outside);
        assert_eq!(rs.langlands_classify(&Weight::zero(4)), Region::Boundary);
    }

    #[test]
    fn wrel_small_cases() {
        let a1 = build_root_system("A1").unwrap();
        let l1 = ints(&[1]);
        let els = a1.enumerate_wrel(1, &l1, &Weight::fundamental(1, 1)).unwrap();
        assert_eq!(els.len(), 2);
        assert!(els[0].word.is_empty());
        assert_eq!(els[1].word, vec![1]);
        assert_eq!(els[1].inversions, vec![(1, 1)]);
        assert_eq!(els[1].image_l1, ints(&[-1]));
    }

    #[test]
    fn wrel_rejects_bad_lines() {
        let rs = build_root_system("A2").unwrap();
        let half = Weight::new(vec![Q::new(1, 2), Q::from_integer(-1)]);
        let err = rs.enumerate_wrel(1, &half, &Weight::fundamental(2, 1)).unwrap_err();
        assert!(err.to_string().contains("non-integral deformation line"));
        let err = rs.enumerate_wrel(1, &ints(&[1, -1]), &Weight::fundamental(2, 2)).unwrap_err();
        assert_eq!(err, Error::NotFundamentalDirection(1));
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(build_root_system("E8").unwrap().weyl_group_order(), 696_729_600);
        assert_eq!(build_root_system("F4").unwrap().weyl_group_order(), 1152);
        let e6 = build_root_system("E6").unwrap();
        // Levi of node 2 in E6 is A5.
        assert_eq!(e6.levi_weyl_order(2).unwrap(), 720);
        let g2 = build_root_system("G2").unwrap();
        assert_eq!(g2.levi_weyl_order(1).unwrap(), 2);
    }
}
