//! Multi-dimensional mother constellation, position deduplication and shaping.
//!
//! Base QAM points live on the odd-integer lattice, so every position (the sum
//! of an MD point's components) is a Gaussian integer and all comparisons in
//! this module are exact.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};

/// A point of the odd-integer lattice or a sum of such points.
pub type Gaussian = Complex<i64>;

pub fn norm_sq(z: Gaussian) -> i64 {
    z.re * z.re + z.im * z.im
}

pub fn dist_sq(a: Gaussian, b: Gaussian) -> i64 {
    norm_sq(a - b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseConstellation {
    points: Vec<Gaussian>,
}

impl BaseConstellation {
    /// Square `m`-QAM on the odd-integer grid (`m` a power of 4).
    pub fn square_qam(m: usize) -> Result<Self> {
        let side = (m as f64).sqrt().round() as usize;
        if m < 4 || side * side != m || !side.is_power_of_two() {
            return Err(Error::InvalidDimensions(format!(
                "square QAM needs M a power of 4, got {m}"
            )));
        }
        let coords: Vec<i64> = (0..side as i64).map(|i| 2 * i - (side as i64 - 1)).collect();
        let points = coords
            .iter()
            .flat_map(|&re| coords.iter().map(move |&im| Complex::new(re, im)))
            .collect();
        Ok(Self { points })
    }

    pub fn bpsk() -> Self {
        Self {
            points: vec![Complex::new(-1, 0), Complex::new(1, 0)],
        }
    }

    /// Arbitrary base set; must be pairwise distinct with zero mean.
    pub fn from_points(points: Vec<Gaussian>) -> Result<Self> {
        let sum: Gaussian = points.iter().sum();
        if points.is_empty() || sum != Complex::new(0, 0) {
            return Err(Error::InvalidDimensions("base constellation must be nonempty and zero-mean".into()));
        }
        for (i, a) in points.iter().enumerate() {
            if points[..i].contains(a) {
                return Err(Error::InvalidDimensions(format!("duplicate base point {a}")));
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Gaussian] {
        &self.points
    }

    pub fn contains(&self, z: Gaussian) -> bool {
        self.points.contains(&z)
    }
}

/// A `2 d_f`-dimensional point: `d_f` base components and their planar sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdPoint {
    /// Stable identifier (index in the mother constellation, 0-based).
    pub index: usize,
    pub components: Vec<Gaussian>,
    pub position: Gaussian,
}

impl MdPoint {
    pub fn new(index: usize, components: Vec<Gaussian>) -> Self {
        let position = components.iter().sum();
        Self {
            index,
            components,
            position,
        }
    }

    /// `d_f` times the component energy minus the position energy; proportional
    /// to the sample variance of the components about their mean.
    pub fn scaled_variance(&self) -> i64 {
        let d = self.components.len() as i64;
        d * self.components.iter().map(|&a| norm_sq(a)).sum::<i64>() - norm_sq(self.position)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalSet {
    pub d_f: usize,
    pub points: Vec<MdPoint>,
}

impl SignalSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Gaussian> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// Mean `|z|^2` over the set.
    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| norm_sq(p.position) as f64).sum::<f64>() / self.len() as f64
    }

    pub fn positions_distinct(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.points.iter().all(|p| seen.insert((p.position.re, p.position.im)))
    }

    /// One row per point: `l re_1 im_1 .. re_df im_df pos_re pos_im`, with
    /// `l` 1-based.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "# l");
        for i in 1..=self.d_f {
            let _ = write!(s, " re{i} im{i}");
        }
        let _ = writeln!(s, " pos_re pos_im");
        for p in &self.points {
            let _ = write!(s, "{}", p.index + 1);
            for c in &p.components {
                let _ = write!(s, " {} {}", c.re, c.im);
            }
            let _ = writeln!(s, " {} {}", p.position.re, p.position.im);
        }
        s
    }
}

/// The full Cartesian power `L^{d_f}`, enumerated lazily.
///
/// Point `l` takes component `i` from base index digit `i` of `l` written in
/// base `M`, most significant digit first.
#[derive(Debug, Clone)]
pub struct MotherConstellation {
    base: BaseConstellation,
    d_f: usize,
}

pub fn build_mother(base: &BaseConstellation, d_f: usize) -> Result<MotherConstellation> {
    if d_f == 0 {
        return Err(Error::InvalidDimensions("d_f must be >= 1".into()));
    }
    Ok(MotherConstellation {
        base: base.clone(),
        d_f,
    })
}

impl MotherConstellation {
    pub fn d_f(&self) -> usize {
        self.d_f
    }

    pub fn base(&self) -> &BaseConstellation {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len().pow(self.d_f as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, l: usize) -> MdPoint {
        let m = self.base.len();
        let mut comps = vec![Complex::new(0, 0); self.d_f];
        let mut rest = l;
        for slot in comps.iter_mut().rev() {
            *slot = self.base.points[rest % m];
            rest /= m;
        }
        MdPoint::new(l, comps)
    }

    pub fn iter(&self) -> impl Iterator<Item = MdPoint> + '_ {
        (0..self.len()).map(move |l| self.point(l))
    }

    pub fn to_signal_set(&self) -> SignalSet {
        SignalSet {
            d_f: self.d_f,
            points: self.iter().collect(),
        }
    }
}

/// Keeps, for each distinct position, the member with the largest component
/// variance (lowest index on ties). Output is sorted by index.
pub fn dedup_positions<I>(points: I, d_f: usize, min_size: usize) -> Result<SignalSet>
where
    I: IntoIterator<Item = MdPoint>,
{
    let mut best: HashMap<(i64, i64), MdPoint> = HashMap::new();
    for p in points {
        let key = (p.position.re, p.position.im);
        match best.get(&key) {
            Some(cur) => {
                let (v, vc) = (p.scaled_variance(), cur.scaled_variance());
                if v > vc || (v == vc && p.index < cur.index) {
                    best.insert(key, p);
                }
            }
            None => {
                best.insert(key, p);
            }
        }
    }
    let mut points: Vec<MdPoint> = best.into_values().collect();
    points.sort_by_key(|p| p.index);
    if points.len() < min_size {
        return Err(Error::SetTooSmall {
            have: points.len(),
            need: min_size,
        });
    }
    Ok(SignalSet { d_f, points })
}

/// How the shaping ratio is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapingMode {
    /// Re-evaluate against the remaining points after every removal.
    #[default]
    Dynamic,
    /// Sort once on the full set and drop from the front.
    Static,
}

/// Shaping score as an exact fraction `nearest_sq / energy`; zero energy
/// compares as +infinity.
#[derive(Debug, Clone, Copy)]
pub struct ShapeRatio {
    pub nearest_sq: i64,
    pub energy: i64,
}

impl ShapeRatio {
    pub fn less_than(&self, other: &ShapeRatio) -> bool {
        match (self.energy == 0, other.energy == 0) {
            (true, _) => false,
            (false, true) => true,
            (false, false) => {
                (self.nearest_sq as i128) * (other.energy as i128)
                    < (other.nearest_sq as i128) * (self.energy as i128)
            }
        }
    }

    pub fn equals(&self, other: &ShapeRatio) -> bool {
        !self.less_than(other) && !other.less_than(self)
    }
}

fn nearest(positions: &[Gaussian], alive: &[bool], i: usize) -> (i64, usize) {
    let mut best = (i64::MAX, usize::MAX);
    for (j, &z) in positions.iter().enumerate() {
        if j != i && alive[j] {
            let d = dist_sq(positions[i], z);
            if d < best.0 {
                best = (d, j);
            }
        }
    }
    best
}

/// Removes points with the smallest `nearest_sq / |z|^2` until `target` remain.
pub fn shape(set: &SignalSet, target: usize, mode: ShapingMode) -> Result<SignalSet> {
    let n = set.len();
    if target > n || !target.is_power_of_two() {
        return Err(Error::TargetTooLarge { target, have: n });
    }
    if target == n {
        return Ok(set.clone());
    }
    if target < 2 {
        return Err(Error::TargetTooLarge { target, have: n });
    }
    let pos = set.positions();
    let mut alive = vec![true; n];
    match mode {
        ShapingMode::Static => {
            let ratios: Vec<ShapeRatio> = (0..n)
                .map(|i| ShapeRatio {
                    nearest_sq: nearest(&pos, &alive, i).0,
                    energy: norm_sq(pos[i]),
                })
                .collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                if ratios[a].less_than(&ratios[b]) {
                    std::cmp::Ordering::Less
                } else if ratios[b].less_than(&ratios[a]) {
                    std::cmp::Ordering::Greater
                } else {
                    set.points[a].index.cmp(&set.points[b].index)
                }
            });
            for &i in order.iter().take(n - target) {
                alive[i] = false;
            }
        }
        ShapingMode::Dynamic => {
            let mut nn: Vec<(i64, usize)> = (0..n).map(|i| nearest(&pos, &alive, i)).collect();
            for _ in 0..n - target {
                let mut pick = usize::MAX;
                let mut pick_ratio = ShapeRatio { nearest_sq: 0, energy: 0 };
                for i in (0..n).filter(|&i| alive[i]) {
                    let r = ShapeRatio {
                        nearest_sq: nn[i].0,
                        energy: norm_sq(pos[i]),
                    };
                    if pick == usize::MAX || r.less_than(&pick_ratio) {
                        pick = i;
                        pick_ratio = r;
                    }
                }
                alive[pick] = false;
                for i in 0..n {
                    if alive[i] && nn[i].1 == pick {
                        nn[i] = nearest(&pos, &alive, i);
                    }
                }
            }
        }
    }
    Ok(SignalSet {
        d_f: set.d_f,
        points: set
            .points
            .iter()
            .zip(&alive)
            .filter(|(_, &a)| a)
            .map(|(p, _)| p.clone())
            .collect(),
    })
}

/// Builds a set of `target` points with distinct positions, starting from
/// `start_m`-QAM and quadrupling `M` whenever deduplication leaves too few
/// positions. Returns the set and the base size actually used.
pub fn select_signal_set(
    d_f: usize,
    target: usize,
    start_m: usize,
    mode: ShapingMode,
) -> Result<(SignalSet, usize)> {
    let mut m = start_m;
    loop {
        let base = BaseConstellation::square_qam(m)?;
        let mother = build_mother(&base, d_f)?;
        match dedup_positions(mother.iter(), d_f, target) {
            Ok(unique) => return Ok((shape(&unique, target, mode)?, m)),
            Err(Error::SetTooSmall { .. }) if m < 1 << 12 => m *= 4,
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> Gaussian {
        Complex::new(re, im)
    }

    fn set_of(positions: &[Gaussian]) -> SignalSet {
        SignalSet {
            d_f: 1,
            points: positions
                .iter()
                .enumerate()
                .map(|(i, &z)| MdPoint::new(i, vec![z]))
                .collect(),
        }
    }

    #[test]
    fn mother_size_and_sample_position() {
        let base = BaseConstellation::square_qam(16).unwrap();
        let mother = build_mother(&base, 3).unwrap();
        assert_eq!(mother.len(), 4096);
        let p = MdPoint::new(0, vec![g(1, 1), g(-3, 3), g(-1, -3)]);
        assert_eq!(p.position, g(-3, 1));
        assert!(p.components.iter().all(|&c| base.contains(c)));
    }

    #[test]
    fn bpsk_pairs() {
        let mother = build_mother(&BaseConstellation::bpsk(), 2).unwrap();
        let mut pos: Vec<i64> = mother.iter().map(|p| p.position.re).collect();
        pos.sort();
        assert_eq!(pos, vec![-2, 0, 0, 2]);

        let unique = dedup_positions(mother.iter(), 2, 0).unwrap();
        let mut pos: Vec<i64> = unique.points.iter().map(|p| p.position.re).collect();
        pos.sort();
        assert_eq!(pos, vec![-2, 0, 2]);
        // (-1,+1) is index 1, (+1,-1) index 2; equal variance keeps index 1
        let zero = unique.points.iter().find(|p| p.position.re == 0).unwrap();
        assert_eq!(zero.index, 1);
    }

    #[test]
    fn variance_tie_keeps_lowest_index() {
        let pts = vec![
            MdPoint::new(5, vec![g(1, 0), g(-1, 0)]),
            MdPoint::new(3, vec![g(0, 1), g(0, -1)]),
        ];
        let out = dedup_positions(pts, 2, 0).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.points[0].index, 3);
    }

    #[test]
    fn variance_prefers_spread_components() {
        let pts = vec![
            MdPoint::new(0, vec![g(1, 1), g(1, 1)]),
            MdPoint::new(1, vec![g(3, 3), g(-1, -1)]),
        ];
        let out = dedup_positions(pts, 2, 0).unwrap();
        assert_eq!(out.points[0].index, 1);
    }

    #[test]
    fn three_by_16qam_has_too_few_positions() {
        let mother = build_mother(&BaseConstellation::square_qam(16).unwrap(), 3).unwrap();
        let err = dedup_positions(mother.iter(), 3, 512).unwrap_err();
        // odd sums of three odd coordinates: 10 values per axis
        assert_eq!(err, Error::SetTooSmall { have: 100, need: 512 });
    }

    #[test]
    fn dedup_is_idempotent() {
        let mother = build_mother(&BaseConstellation::square_qam(16).unwrap(), 2).unwrap();
        let once = dedup_positions(mother.iter(), 2, 0).unwrap();
        let twice = dedup_positions(once.points.clone(), 2, 0).unwrap();
        assert_eq!(once, twice);
        assert!(once.positions_distinct());
    }

    #[test]
    fn shape_identity_at_full_size() {
        let s = set_of(&[g(1, 0), g(-1, 0), g(3, 0), g(-3, 0)]);
        assert_eq!(shape(&s, 4, ShapingMode::Dynamic).unwrap(), s);
        assert!(matches!(shape(&s, 8, ShapingMode::Dynamic), Err(Error::TargetTooLarge { .. })));
    }

    // positions {0.1, 0.2, 10, -10} scaled by 10; the ratio is scale-free.
    #[test]
    fn shape_small_line() {
        let s = set_of(&[g(1, 0), g(2, 0), g(100, 0), g(-100, 0)]);
        let keep = |mode| {
            let mut v: Vec<i64> = shape(&s, 2, mode).unwrap().points.iter().map(|p| p.position.re).collect();
            v.sort();
            v
        };
        // 0.2 goes first (ratio 0.25); 0.1 is then isolated (ratio 9801) and
        // +10 has the smallest ratio 0.9801
        assert_eq!(keep(ShapingMode::Dynamic), vec![-100, 1]);
        // static ranks 0.2 (0.25), 10 (0.9604), 0.1 (1.0), -10 (1.0201)
        assert_eq!(keep(ShapingMode::Static), vec![-100, 1]);
    }

    #[test]
    fn dynamic_shape_removes_current_minimum() {
        let mother = build_mother(&BaseConstellation::square_qam(16).unwrap(), 2).unwrap();
        let unique = dedup_positions(mother.iter(), 2, 0).unwrap();
        // replay removals one at a time and compare with a fresh recomputation
        let mut cur = unique.clone();
        while cur.len() > 32 {
            let pos = cur.positions();
            let alive = vec![true; pos.len()];
            let ratios: Vec<ShapeRatio> = (0..pos.len())
                .map(|i| ShapeRatio { nearest_sq: nearest(&pos, &alive, i).0, energy: norm_sq(pos[i]) })
                .collect();
            let min = ratios.iter().fold(ratios[0], |m, r| if r.less_than(&m) { *r } else { m });
            let removed = (0..pos.len())
                .filter(|&i| ratios[i].equals(&min))
                .min_by_key(|&i| cur.points[i].index)
                .unwrap();
            cur.points.remove(removed);
        }
        let direct = shape(&unique, 32, ShapingMode::Dynamic).unwrap();
        assert_eq!(direct, cur);
    }

    #[test]
    fn escalation_reaches_512_for_df3() {
        let (set, m) = select_signal_set(3, 512, 16, ShapingMode::Dynamic).unwrap();
        assert_eq!(m, 256);
        assert_eq!(set.len(), 512);
        assert!(set.positions_distinct());
        for p in &set.points {
            assert_eq!(p.components.iter().sum::<Gaussian>(), p.position);
        }
    }
}
