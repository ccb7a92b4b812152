//! Exact lattice analogue: direction sets, Kaufman pair counts,
//! Szemerédi–Trotter incidences and the dyadic rich-line search.
//!
//! Geometry and counts use integers (i64 storage, i128 intermediates).
//! Floating point only enters through thresholds with real exponents.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn narrow(v: i128, what: &'static str) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(what))
}

/// Primitive direction class `{v, -v}` with `b > 0`, or `b = 0` and `a = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slope {
    pub a: i64,
    pub b: i64,
}

impl Slope {
    pub const HORIZONTAL: Slope = Slope { a: 1, b: 0 };
    pub const VERTICAL: Slope = Slope { a: 0, b: 1 };

    /// Canonical class of a nonzero vector; `None` for the zero vector.
    pub fn from_vector(dx: i64, dy: i64) -> Option<Self> {
        if dx == 0 && dy == 0 {
            return None;
        }
        let g = gcd(dx as i128, dy as i128) as i64;
        let (mut a, mut b) = (dx / g, dy / g);
        if b < 0 || (b == 0 && a < 0) {
            a = -a;
            b = -b;
        }
        Some(Self { a, b })
    }

    pub fn between(p: LatticePoint, q: LatticePoint) -> Result<Option<Self>> {
        let dx = narrow(q.x as i128 - p.x as i128, "point difference")?;
        let dy = narrow(q.y as i128 - p.y as i128, "point difference")?;
        Ok(Self::from_vector(dx, dy))
    }

    /// `a y - b x`: constant along every line parallel to the slope.
    fn line_key(self, p: LatticePoint) -> i128 {
        self.a as i128 * p.y as i128 - self.b as i128 * p.x as i128
    }

    pub fn norm_sq(self) -> i128 {
        self.a as i128 * self.a as i128 + self.b as i128 * self.b as i128
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// `A x + B y = C`, divided by `gcd(A, B, C)` with `A > 0` or `A = 0, B > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeLine {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl LatticeLine {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(invalid("line", "(A, B) = (0, 0)"));
        }
        let g = gcd(gcd(a as i128, b as i128), c as i128) as i64;
        let (mut a, mut b, mut c) = (a / g, b / g, c / g);
        if a < 0 || (a == 0 && b < 0) {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(Self { a, b, c })
    }

    /// Line through `p` parallel to `v`.
    pub fn through(p: LatticePoint, v: Slope) -> Result<Self> {
        let c = -(v.line_key(p));
        Self::new(v.b, -v.a, narrow(c, "line constant")?)
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.a as i128 * p.x as i128 + self.b as i128 * p.y as i128 == self.c as i128
    }

    pub fn direction(&self) -> Slope {
        Slope::from_vector(-self.b, self.a).expect("nonzero normal")
    }
}

impl fmt::Display for LatticeLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y = {}", self.a, self.b, self.c)
    }
}

/// Ordered pairs of distinct indices into a point list.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PairSet {
    pairs: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn new(pairs: Vec<(usize, usize)>, n: usize) -> Result<Self> {
        for &(i, j) in &pairs {
            if i == j || i >= n || j >= n {
                return Err(Error::InvalidPair(i, j));
            }
        }
        Ok(Self { pairs })
    }

    pub fn all_pairs(n: usize) -> Self {
        let pairs = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn pair_slope(p: &[LatticePoint], (i, j): (usize, usize)) -> Result<Slope> {
    Slope::between(p[i], p[j])?.ok_or(Error::DegeneratePair(i, j))
}

/// Number of pairs of `G` per slope class.
pub fn slope_multiplicities(p: &[LatticePoint], g: &PairSet) -> Result<BTreeMap<Slope, u64>> {
    let mut out = BTreeMap::new();
    for &pair in g.pairs() {
        *out.entry(pair_slope(p, pair)?).or_insert(0) += 1;
    }
    Ok(out)
}

/// `S(G)`, antipodal directions identified.
pub fn direction_set(p: &[LatticePoint], g: &PairSet) -> Result<BTreeSet<Slope>> {
    g.pairs().iter().map(|&pair| pair_slope(p, pair)).collect()
}

/// Points per line parallel to `v`, keyed by `a y - b x`.
fn line_counts(p: &[LatticePoint], v: Slope) -> HashMap<i128, u64> {
    let mut counts = HashMap::new();
    for &q in p {
        *counts.entry(v.line_key(q)).or_insert(0) += 1;
    }
    counts
}

/// `#{(p, q) : p ≠ q, p - q ∥ v}`, i.e. the ordered pairs identified by the
/// projection along `v`; computed as `Σ_ℓ |ℓ∩P|(|ℓ∩P| - 1)` over lines
/// parallel to `v`.
pub fn kaufman_pair_count(p: &[LatticePoint], v: Slope) -> u64 {
    line_counts(p, v).values().map(|&c| c * (c - 1)).sum()
}

/// Number of distinct lines parallel to `v` meeting `P`, i.e. the size of
/// the projection of `P` along `v`.
pub fn projection_count(p: &[LatticePoint], v: Slope) -> u64 {
    line_counts(p, v).len() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadDirection {
    pub slope: Slope,
    pub projection_count: u64,
    pub pair_count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadDirections {
    pub threshold: f64,
    pub directions: Vec<BadDirection>,
    pub pair_total: u64,
    /// `n(n - 1)`; the returned pair counts can never add up to more.
    pub pair_budget: u64,
}

impl BadDirections {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slope,projection_count,pair_count\n");
        for d in &self.directions {
            writeln!(out, "\"{}\",{},{}", d.slope, d.projection_count, d.pair_count).unwrap();
        }
        out
    }
}

/// `c` with `c(c - 1)/2 = pairs`.
fn points_on_line(pairs: u64) -> u64 {
    let c = (1 + (1 + 8 * pairs).isqrt()) / 2;
    debug_assert_eq!(c * (c - 1) / 2, pairs);
    c
}

/// Slopes `v` (spanned by pairs of `P`, plus both axes) whose projection
/// count is at most `C_bad n^s`.
pub fn bad_directions(p: &[LatticePoint], s: f64, c_bad: f64) -> Result<BadDirections> {
    if !(c_bad >= 1.0) {
        return Err(invalid("c_bad", format!("{c_bad} < 1")));
    }
    let n = p.len() as u64;
    // unordered pairs per (slope, line): a line with c points carries c(c-1)/2
    let mut per_line: HashMap<(Slope, i128), u64> = HashMap::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let v = Slope::between(p[i], p[j])?.ok_or(Error::DegeneratePair(i, j))?;
            *per_line.entry((v, v.line_key(p[i]))).or_insert(0) += 1;
        }
    }
    let mut collapse: BTreeMap<Slope, (u64, u64)> = BTreeMap::new();
    collapse.insert(Slope::HORIZONTAL, (0, 0));
    collapse.insert(Slope::VERTICAL, (0, 0));
    for ((v, _), pairs) in per_line {
        let c = points_on_line(pairs);
        let e = collapse.entry(v).or_insert((0, 0));
        e.0 += c - 1;
        e.1 += 2 * pairs;
    }
    let threshold = c_bad * (n as f64).powf(s);
    let directions: Vec<BadDirection> = collapse
        .into_iter()
        .map(|(slope, (lost, pairs))| BadDirection {
            slope,
            projection_count: n - lost,
            pair_count: pairs,
        })
        .filter(|d| d.projection_count as f64 <= threshold)
        .collect();
    let pair_total = directions.iter().map(|d| d.pair_count).sum();
    Ok(BadDirections {
        threshold,
        directions,
        pair_total,
        pair_budget: n * n.saturating_sub(1),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StReport {
    pub incidences: u64,
    pub lines: usize,
    pub points: usize,
    /// `I / (|L|^(2/3) |P|^(2/3) + |L| + |P|)`.
    pub ratio: f64,
}

/// `#{(ℓ, p) : p ∈ ℓ}` with lines grouped by normal vector, so each point
/// is evaluated once per normal class.
pub fn st_incidences(lines: &[LatticeLine], p: &[LatticePoint]) -> StReport {
    let mut groups: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
    for l in lines {
        groups.entry((l.a, l.b)).or_default().push(l.c);
    }
    let groups: Vec<_> = groups.into_iter().collect();
    let incidences: u64 = groups
        .par_iter()
        .map(|((a, b), cs)| {
            let mut values: HashMap<i128, u64> = HashMap::new();
            for q in p {
                *values.entry(*a as i128 * q.x as i128 + *b as i128 * q.y as i128).or_insert(0) += 1;
            }
            cs.iter().map(|&c| values.get(&(c as i128)).copied().unwrap_or(0)).sum::<u64>()
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum();
    let (nl, np) = (lines.len() as f64, p.len() as f64);
    let denom = (nl * np).powf(2.0 / 3.0) + nl + np;
    StReport {
        incidences,
        lines: lines.len(),
        points: p.len(),
        ratio: if denom > 0.0 { incidences as f64 / denom } else { 0.0 },
    }
}

/// Heaviest line spanned by two points of `P` (ties: smallest line), with its
/// point count. `None` when `P` has fewer than two points.
pub fn heaviest_line(p: &[LatticePoint]) -> Result<Option<(LatticeLine, u64)>> {
    let mut per_line: HashMap<LatticeLine, u64> = HashMap::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let v = Slope::between(p[i], p[j])?.ok_or(Error::DegeneratePair(i, j))?;
            *per_line.entry(LatticeLine::through(p[i], v)?).or_insert(0) += 1;
        }
    }
    Ok(per_line
        .into_iter()
        .map(|(l, pairs)| (l, points_on_line(pairs)))
        .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0))))
}

pub fn line_count(p: &[LatticePoint], l: &LatticeLine) -> u64 {
    p.iter().filter(|&&q| l.contains(q)).count() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub j: u32,
    pub slopes: usize,
    /// `c_st n^(1+s) / (2^j max(j,1)^2)`.
    pub required: f64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineLevelRecord {
    pub k: u32,
    /// Slopes of `E_j` whose largest feasible line level is `k`.
    pub slopes: usize,
    /// `c_st 2^j / (2^(2k) max(k,1)^2)`.
    pub required: f64,
    /// `2^k >= 2^j / n`.
    pub scale_condition: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub n: usize,
    pub pairs: usize,
    /// `|G| >= n^(1+s)`.
    pub enough_pairs: bool,
    pub levels: Vec<LevelRecord>,
    pub chosen_j: Option<u32>,
    /// `2^j >= c_st n^(2-s) log^12 n` for the chosen level.
    pub large_level_gate: bool,
    pub line_levels: Vec<LineLevelRecord>,
    pub chosen_k: Option<u32>,
    /// Share of `E_j` sharing the chosen `k`, against `1/log n`.
    pub pigeonhole_share: f64,
    /// Lines in the chosen `L_{e,k}` divided by `n/2^k`.
    pub line_count_ratio: f64,
    pub pigeonhole_failed: bool,
}

impl SearchTrace {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n={} pairs={} enough_pairs={}", self.n, self.pairs, self.enough_pairs).unwrap();
        for l in &self.levels {
            writeln!(out, "level j={} slopes={} required={} feasible={}", l.j, l.slopes, l.required, l.feasible).unwrap();
        }
        writeln!(out, "chosen_j={:?} large_level_gate={}", self.chosen_j, self.large_level_gate).unwrap();
        for l in &self.line_levels {
            writeln!(
                out,
                "line_level k={} slopes={} required={} scale_condition={}",
                l.k, l.slopes, l.required, l.scale_condition
            )
            .unwrap();
        }
        writeln!(
            out,
            "chosen_k={:?} share={} line_count_ratio={} pigeonhole_failed={}",
            self.chosen_k, self.pigeonhole_share, self.line_count_ratio, self.pigeonhole_failed
        )
        .unwrap();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RichLineResult {
    pub line: LatticeLine,
    pub count: u64,
    pub trace: SearchTrace,
    /// Heaviest pair-spanned line, computed when `n <= BRUTE_FORCE_LIMIT`.
    pub brute_force: Option<(LatticeLine, u64)>,
}

pub const BRUTE_FORCE_LIMIT: usize = 2000;

fn dyadic_level(x: u64) -> u32 {
    63 - x.leading_zeros()
}

/// Dyadic pigeonholing for a rich line: group `G` by slope into levels
/// `E_j = {e : 2^j <= #pairs(e) < 2^(j+1)}`, take the largest `j` with
/// `|E_j| >= c_st n^(1+s)/(2^j j²)`, bucket the lines of each `e ∈ E_j` by
/// point count into `L_{e,k}`, and pigeonhole a common `k`. When any step
/// fails the heaviest pair-spanned line is returned with
/// `trace.pigeonhole_failed` set.
pub fn rich_line_search(p: &[LatticePoint], g: &PairSet, s: f64, c_st: f64) -> Result<RichLineResult> {
    if !(c_st > 0.0) {
        return Err(invalid("c_st", format!("{c_st} must be positive")));
    }
    if p.len() < 2 {
        return Err(invalid("P", "need at least two points"));
    }
    let n = p.len();
    let nf = n as f64;
    let log_n = nf.log2().max(1.0);
    let mut trace = SearchTrace {
        n,
        pairs: g.len(),
        enough_pairs: g.len() as f64 >= nf.powf(1.0 + s),
        ..Default::default()
    };
    let brute_force = if n <= BRUTE_FORCE_LIMIT { heaviest_line(p)? } else { None };

    let mut by_slope: BTreeMap<Slope, Vec<(usize, usize)>> = BTreeMap::new();
    for &pair in g.pairs() {
        by_slope.entry(pair_slope(p, pair)?).or_default().push(pair);
    }
    let mut levels: BTreeMap<u32, Vec<Slope>> = BTreeMap::new();
    for (v, pairs) in &by_slope {
        levels.entry(dyadic_level(pairs.len() as u64)).or_default().push(*v);
    }
    for (&j, slopes) in &levels {
        let jj = (j.max(1) as f64).powi(2);
        let required = c_st * nf.powf(1.0 + s) / ((j as f64).exp2() * jj);
        trace.levels.push(LevelRecord {
            j,
            slopes: slopes.len(),
            required,
            feasible: slopes.len() as f64 >= required,
        });
    }
    let chosen = trace.levels.iter().rev().find(|l| l.feasible).map(|l| l.j);
    trace.chosen_j = chosen;

    // per slope of the chosen level: lines spanned by its pairs, bucketed by
    // point count
    let bucketed = match chosen {
        Some(j) => Some(
            levels[&j]
                .iter()
                .map(|&v| {
                    let counts = line_counts(p, v);
                    let mut keyed: BTreeMap<i128, LatticeLine> = BTreeMap::new();
                    for &(a, _) in &by_slope[&v] {
                        let key = v.line_key(p[a]);
                        if !keyed.contains_key(&key) {
                            keyed.insert(key, LatticeLine::through(p[a], v)?);
                        }
                    }
                    let mut buckets: BTreeMap<u32, Vec<(LatticeLine, u64)>> = BTreeMap::new();
                    for (key, l) in keyed {
                        let c = counts[&key];
                        buckets.entry(dyadic_level(c)).or_default().push((l, c));
                    }
                    Ok(buckets)
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let found = chosen.and_then(|j| {
        let pow_j = (j as f64).exp2();
        trace.large_level_gate = pow_j >= c_st * nf.powf(2.0 - s) * log_n.powi(12);
        let per_slope = bucketed.as_ref()?;
        let required_k = |k: u32| c_st * pow_j / ((2 * k) as f64).exp2() / (k.max(1) as f64).powi(2);
        let mut choice: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (idx, buckets) in per_slope.iter().enumerate() {
            if let Some((&k, _)) = buckets
                .iter()
                .rev()
                .find(|(&k, ls)| ls.len() as f64 >= required_k(k))
            {
                choice.entry(k).or_default().push(idx);
            }
        }
        for (&k, idxs) in &choice {
            trace.line_levels.push(LineLevelRecord {
                k,
                slopes: idxs.len(),
                required: required_k(k),
                scale_condition: (k as f64).exp2() >= pow_j / nf,
            });
        }
        let (&k, idxs) = choice.iter().max_by(|a, b| a.1.len().cmp(&b.1.len()).then(a.0.cmp(b.0)))?;
        trace.chosen_k = Some(k);
        trace.pigeonhole_share = idxs.len() as f64 / per_slope.len() as f64;
        let lines_at_k: usize = idxs.iter().map(|&i| per_slope[i][&k].len()).sum();
        trace.line_count_ratio = lines_at_k as f64 / idxs.len() as f64 / (nf / (k as f64).exp2());
        if trace.pigeonhole_share < 1.0 / log_n {
            return None;
        }
        idxs.iter()
            .flat_map(|&i| per_slope[i][&k].iter().copied())
            .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
    });

    let (line, count) = match found {
        Some(x) => x,
        None => {
            trace.pigeonhole_failed = true;
            match brute_force {
                Some(x) => x,
                None => heaviest_line(p)?.expect("two or more points"),
            }
        }
    };
    Ok(RichLineResult {
        line,
        count,
        trace,
        brute_force,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeExample {
    pub points: Vec<LatticePoint>,
    pub pairs: PairSet,
    pub directions: usize,
    /// Grid example: `r = n^(s - 1/2)`; parallel lines: number of lines `k`.
    pub parameter: f64,
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// Primitive classes `v ∈ [-r, r]²` with `r = n^(s - 1/2)`.
pub fn primitive_classes(n: u64, s: f64) -> Vec<Slope> {
    let r = ((n as f64).powf(s - 0.5) + 1e-9).floor() as i64;
    let mut out = BTreeSet::new();
    for a in -r..=r {
        for b in -r..=r {
            if gcd(a as i128, b as i128) == 1 {
                out.insert(Slope::from_vector(a, b).expect("nonzero"));
            }
        }
    }
    out.into_iter().collect()
}

/// The grid `{0..√n-1}²` with `G` the ordered pairs whose difference is
/// parallel to a primitive vector of `[-r, r]²`, `r = n^(s - 1/2)`.
pub fn gen_grid_example(n: u64, s: f64) -> Result<LatticeExample> {
    let side = exact_sqrt(n).filter(|&r| r >= 2).ok_or_else(|| invalid("n", format!("{n} is not a square >= 4")))?;
    if !(s >= 0.5 && s < 1.0) {
        return Err(invalid("s", format!("{s} outside [1/2, 1)")));
    }
    let side = side as i64;
    let points: Vec<LatticePoint> = (0..side)
        .flat_map(|x| (0..side).map(move |y| LatticePoint::new(x, y)))
        .collect();
    let classes: BTreeSet<Slope> = primitive_classes(n, s).into_iter().collect();
    let mut pairs = Vec::new();
    let mut used = BTreeSet::new();
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let v = Slope::between(points[i], points[j])?.expect("distinct grid points");
            if classes.contains(&v) {
                pairs.push((i, j));
                used.insert(v);
            }
        }
    }
    Ok(LatticeExample {
        pairs: PairSet::new(pairs, points.len())?,
        points,
        directions: used.len(),
        parameter: (n as f64).powf(s - 0.5),
    })
}

/// `k = ⌈n^(1-s)⌉` horizontal lines with `⌈n/k⌉` points each; `G` is every
/// ordered pair on a common line.
pub fn gen_parallel_lines_example(n: u64, s: f64) -> Result<LatticeExample> {
    if n < 2 {
        return Err(invalid("n", format!("{n} < 2")));
    }
    if !(s > 0.5 && s < 1.0) {
        return Err(invalid("s", format!("{s} outside (1/2, 1)")));
    }
    let k = ((n as f64).powf(1.0 - s) - 1e-9).ceil().max(1.0) as u64;
    let per = n.div_ceil(k);
    let mut points = Vec::new();
    let mut pairs = Vec::new();
    for line in 0..k {
        let base = points.len();
        points.extend((0..per).map(|x| LatticePoint::new(x as i64, line as i64)));
        for i in 0..per as usize {
            for j in 0..per as usize {
                if i != j {
                    pairs.push((base + i, base + j));
                }
            }
        }
    }
    Ok(LatticeExample {
        pairs: PairSet::new(pairs, points.len())?,
        directions: usize::from(per >= 2),
        points,
        parameter: k as f64,
    })
}

pub fn points_to_text(p: &[LatticePoint]) -> String {
    let mut out = String::from("# lattice points\n");
    for q in p {
        writeln!(out, "{} {}", q.x, q.y).unwrap();
    }
    out
}

pub fn parse_points(text: &str) -> Result<Vec<LatticePoint>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<i64>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(x)), Some(Ok(y)), None) => out.push(LatticePoint::new(x, y)),
            _ => {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: format!("expected two integers, got `{line}`"),
                })
            }
        }
    }
    Ok(out)
}
