use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{RationalLock, TongueGrid};

/// A 4-connected set of cells sharing one lock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TongueRegion {
    pub lock: RationalLock,
    pub rows: usize,
    pub cols: usize,
    /// Row-major membership mask over the whole grid.
    pub cell_mask: Vec<bool>,
    /// Longest contiguous run of member cells in each row times the x
    /// spacing, Hz.
    pub width_by_row: Vec<f64>,
    /// Number of member cells.
    pub area: usize,
    #[serde(skip)]
    dx: f64,
}

impl TongueRegion {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.cell_mask[row * self.cols + col]
    }

    /// Maximal runs `(first_col, last_col)` of member cells in `row`.
    pub fn row_runs(&self, row: usize) -> Vec<(usize, usize)> {
        runs(&self.cell_mask[row * self.cols..(row + 1) * self.cols])
    }

    /// Width of the longest run in `row` counting only columns accepted by
    /// `keep`, Hz.
    pub fn row_width_where(&self, row: usize, keep: impl Fn(usize) -> bool) -> f64 {
        let mask: Vec<bool> = (0..self.cols)
            .map(|c| self.contains(row, c) && keep(c))
            .collect();
        longest_run(&mask) as f64 * self.dx
    }
}

fn runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &m) in mask.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, mask.len() - 1));
    }
    out
}

fn longest_run(mask: &[bool]) -> usize {
    runs(mask).iter().map(|(a, b)| b - a + 1).max().unwrap_or(0)
}

/// Classify every cell and split each lock into 4-connected regions,
/// largest first.
pub fn tongue_regions(grid: &TongueGrid, max_q: u64, tol: f64) -> Vec<TongueRegion> {
    let rows = grid.spec.rows();
    let cols = grid.spec.cols();
    let dx = grid.spec.x_axis.spacing().abs();
    let locks = grid.classify(max_q, tol);
    let mut label = vec![usize::MAX; rows * cols];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();

    for seed_idx in 0..rows * cols {
        let Some(lock) = locks[seed_idx] else {
            continue;
        };
        if label[seed_idx] != usize::MAX {
            continue;
        }
        let id = regions.len();
        let mut mask = vec![false; rows * cols];
        let mut area = 0;
        label[seed_idx] = id;
        queue.push_back(seed_idx);
        while let Some(idx) = queue.pop_front() {
            mask[idx] = true;
            area += 1;
            let (r, c) = (idx / cols, idx % cols);
            let mut visit = |n: usize| {
                if label[n] == usize::MAX && locks[n] == Some(lock) {
                    label[n] = id;
                    queue.push_back(n);
                }
            };
            if r > 0 {
                visit(idx - cols);
            }
            if r + 1 < rows {
                visit(idx + cols);
            }
            if c > 0 {
                visit(idx - 1);
            }
            if c + 1 < cols {
                visit(idx + 1);
            }
        }
        let width_by_row = (0..rows)
            .map(|r| longest_run(&mask[r * cols..(r + 1) * cols]) as f64 * dx)
            .collect();
        regions.push((
            seed_idx,
            TongueRegion {
                lock,
                rows,
                cols,
                cell_mask: mask,
                width_by_row,
                area,
                dx,
            },
        ));
    }

    regions.sort_by(|(ia, a), (ib, b)| {
        b.area
            .cmp(&a.area)
            .then(a.lock.q.cmp(&b.lock.q))
            .then(a.lock.p.cmp(&b.lock.p))
            .then(ia.cmp(ib))
    });
    regions.into_iter().map(|(_, r)| r).collect()
}
