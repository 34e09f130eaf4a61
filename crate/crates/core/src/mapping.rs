//! User-to-subcarrier mapping matrix.
//!
//! A `K x J` binary matrix `F` where `f[k][j] = 1` iff user `j` places a
//! nonzero element on subcarrier `k`. Every column has `N` ones, every row has
//! `d_f` ones and the columns are pairwise distinct.
//!
//! External indices (users and subcarriers) are 1-based. The `*_0` accessors
//! are the 0-based equivalents used throughout the rest of the crate.

use crate::error::{Error, Result};

/// Regular 4x6 mapping with three users per subcarrier and the default
/// column order.
pub const PRESET_K4_J6: [[u8; 6]; 4] = [
    [1, 1, 0, 0, 0, 1],
    [1, 0, 0, 1, 1, 0],
    [0, 1, 1, 1, 0, 0],
    [0, 0, 1, 0, 1, 1],
];

/// Name under which [`PRESET_K4_J6`] can be requested from configs.
pub const PRESET_K4_J6_NAME: &str = "k4-j6";

/// Regular 4x4 mapping with two users per subcarrier.
pub const PRESET_K4_D2: [[u8; 4]; 4] = [
    [1, 0, 1, 0],
    [1, 0, 0, 1],
    [0, 1, 1, 0],
    [0, 1, 0, 1],
];

pub const PRESET_K4_D2_NAME: &str = "k4-d2";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingMatrix {
    subcarriers: usize,
    users: usize,
    nonzeros: usize,
    d_f: usize,
    entries: Vec<Vec<u8>>,
    // per subcarrier, ascending 0-based user indices
    occupancy: Vec<Vec<usize>>,
    // per user, ascending 0-based subcarrier indices
    footprint: Vec<Vec<usize>>,
}

/// Binomial coefficient, saturating on overflow.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).unwrap_or(usize::MAX)
}

/// All `n`-subsets of `0..k` in lexicographic order.
fn lexicographic_subsets(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    if n == 0 || n > k {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < k - n + i {
                cur[i] += 1;
                for j in i + 1..n {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl MappingMatrix {
    /// Builds a mapping from the first `j` lexicographic `n`-subsets of the
    /// `k` subcarriers, or validates `preset` when one is given.
    pub fn build(k: usize, n: usize, j: usize, preset: Option<&[Vec<u8>]>) -> Result<Self> {
        if k == 0 || n == 0 || j == 0 || n > k {
            return Err(Error::InvalidDimensions(format!(
                "need 1 <= N <= K and J >= 1 (K={k}, N={n}, J={j})"
            )));
        }
        let max_users = binomial(k, n);
        if j > max_users {
            return Err(Error::InvalidDimensions(format!(
                "J={j} exceeds C({k},{n})={max_users}"
            )));
        }
        let entries = match preset {
            Some(grid) => grid.to_vec(),
            None => {
                let mut grid = vec![vec![0u8; j]; k];
                for (col, subset) in lexicographic_subsets(k, n).into_iter().take(j).enumerate() {
                    for row in subset {
                        grid[row][col] = 1;
                    }
                }
                grid
            }
        };
        let m = match (preset, Self::from_grid(entries)) {
            (None, Err(Error::InvalidPreset(why))) => {
                return Err(Error::InvalidDimensions(format!(
                    "first {j} lexicographic {n}-subsets of {k} subcarriers are irregular: {why}"
                )))
            }
            (_, r) => r?,
        };
        if m.subcarriers != k || m.users != j || m.nonzeros != n {
            return Err(Error::InvalidPreset(format!(
                "preset is {}x{} with column weight {}, expected {k}x{j} with weight {n}",
                m.subcarriers, m.users, m.nonzeros
            )));
        }
        Ok(m)
    }

    /// Looks up a named preset grid.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            PRESET_K4_J6_NAME => {
                Self::from_grid(PRESET_K4_J6.iter().map(|r| r.to_vec()).collect())
            }
            PRESET_K4_D2_NAME => {
                Self::from_grid(PRESET_K4_D2.iter().map(|r| r.to_vec()).collect())
            }
            other => Err(Error::InvalidPreset(format!("unknown preset {other:?}"))),
        }
    }

    /// Validates an explicit grid (rows are subcarriers).
    pub fn from_grid(entries: Vec<Vec<u8>>) -> Result<Self> {
        let k = entries.len();
        if k == 0 || entries[0].is_empty() {
            return Err(Error::InvalidPreset("empty grid".into()));
        }
        let j = entries[0].len();
        for (row, r) in entries.iter().enumerate() {
            if r.len() != j {
                return Err(Error::InvalidPreset(format!(
                    "row {} has {} columns, expected {j}",
                    row + 1,
                    r.len()
                )));
            }
            if let Some(col) = r.iter().position(|&v| v > 1) {
                return Err(Error::InvalidPreset(format!(
                    "entry ({}, {}) is not binary",
                    row + 1,
                    col + 1
                )));
            }
        }
        let col_weight = |c: usize| entries.iter().filter(|r| r[c] == 1).count();
        let n = col_weight(0);
        for c in 0..j {
            let w = col_weight(c);
            if w != n || w == 0 {
                return Err(Error::InvalidPreset(format!(
                    "column {} has weight {w}, expected {n}",
                    c + 1
                )));
            }
        }
        let d_f = entries[0].iter().filter(|&&v| v == 1).count();
        for (row, r) in entries.iter().enumerate() {
            let w = r.iter().filter(|&&v| v == 1).count();
            if w != d_f || w == 0 {
                return Err(Error::InvalidPreset(format!(
                    "row {} has weight {w}, expected {d_f}",
                    row + 1
                )));
            }
        }
        for a in 0..j {
            for b in a + 1..j {
                if entries.iter().all(|r| r[a] == r[b]) {
                    return Err(Error::InvalidPreset(format!(
                        "columns {} and {} are identical",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        if j == binomial(k, n) && d_f != binomial(k - 1, n - 1) {
            return Err(Error::InvalidPreset(format!(
                "full mapping must have d_f = C({},{})",
                k - 1,
                n - 1
            )));
        }
        let occupancy = entries
            .iter()
            .map(|r| (0..j).filter(|&c| r[c] == 1).collect())
            .collect();
        let footprint = (0..j)
            .map(|c| (0..k).filter(|&row| entries[row][c] == 1).collect())
            .collect();
        Ok(Self {
            subcarriers: k,
            users: j,
            nonzeros: n,
            d_f,
            entries,
            occupancy,
            footprint,
        })
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn nonzeros(&self) -> usize {
        self.nonzeros
    }

    pub fn d_f(&self) -> usize {
        self.d_f
    }

    pub fn entry(&self, k0: usize, j0: usize) -> u8 {
        self.entries[k0][j0]
    }

    pub fn grid(&self) -> &[Vec<u8>] {
        &self.entries
    }

    /// 1-based: the users sharing subcarrier `k`, ascending.
    pub fn users_on_subcarrier(&self, k: usize) -> Result<Vec<usize>> {
        if k == 0 || k > self.subcarriers {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.subcarriers,
            });
        }
        Ok(self.occupancy[k - 1].iter().map(|&j| j + 1).collect())
    }

    /// 0-based occupancy of subcarrier `k0`.
    pub fn users_0(&self, k0: usize) -> &[usize] {
        &self.occupancy[k0]
    }

    /// 0-based subcarriers used by user `j0`, ascending.
    pub fn subcarriers_of_0(&self, j0: usize) -> &[usize] {
        &self.footprint[j0]
    }

    /// Position of user `j0` inside the ascending occupancy list of `k0`.
    pub fn slot_of(&self, k0: usize, j0: usize) -> Option<usize> {
        self.occupancy[k0].iter().position(|&u| u == j0)
    }

    /// Text rendering, one subcarrier per line.
    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_j6_preset_is_valid() {
        let grid: Vec<Vec<u8>> = PRESET_K4_J6.iter().map(|r| r.to_vec()).collect();
        let f = MappingMatrix::build(4, 2, 6, Some(&grid)).unwrap();
        assert_eq!(f.d_f(), 3);
        for k in 1..=4 {
            assert_eq!(f.users_on_subcarrier(k).unwrap().len(), 3);
        }
        assert_eq!(f.users_on_subcarrier(1).unwrap(), vec![1, 2, 6]);
        assert_eq!(f.users_on_subcarrier(3).unwrap(), vec![2, 3, 4]);
    }

    #[test]
    fn identity_mapping() {
        let f = MappingMatrix::build(2, 1, 2, None).unwrap();
        assert_eq!(f.grid(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(f.users_on_subcarrier(1).unwrap(), vec![1]);
    }

    #[test]
    fn too_many_users() {
        assert!(matches!(
            MappingMatrix::build(4, 2, 7, None),
            Err(Error::InvalidDimensions(_))
        ));
    }

    #[test]
    fn out_of_range_subcarrier() {
        let f = MappingMatrix::preset(PRESET_K4_J6_NAME).unwrap();
        assert_eq!(
            f.users_on_subcarrier(5),
            Err(Error::IndexOutOfRange { index: 5, max: 4 })
        );
        assert!(f.users_on_subcarrier(0).is_err());
    }

    #[test]
    fn preset_with_bad_row_weight_is_rejected() {
        let grid = vec![vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 1]];
        let err = MappingMatrix::from_grid(grid).unwrap_err();
        assert!(matches!(err, Error::InvalidPreset(ref m) if m.contains("row 2")), "{err}");
    }

    #[test]
    fn duplicate_columns_rejected() {
        let grid = vec![vec![1, 1], vec![0, 0]];
        assert!(MappingMatrix::from_grid(grid).is_err());
    }

    #[test]
    fn lexicographic_default_order() {
        let f = MappingMatrix::build(4, 2, 6, None).unwrap();
        // columns: {1,2},{1,3},{1,4},{2,3},{2,4},{3,4}
        assert_eq!(f.subcarriers_of_0(0), &[0, 1]);
        assert_eq!(f.subcarriers_of_0(2), &[0, 3]);
        assert_eq!(f.subcarriers_of_0(5), &[2, 3]);
        assert_eq!(f.d_f(), 3);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(3, 4), 0);
    }
}
