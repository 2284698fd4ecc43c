use serde::Serialize;
use sts_kinematics::Vec2;

use crate::{CapabilityMap, MapGrid};

pub type Cell = (usize, usize);

/// 8-connected components of the cells selected by `pick`.
pub fn components(nz: usize, ny: usize, pick: impl Fn(usize, usize) -> bool) -> Vec<Vec<Cell>> {
    let mut seen = vec![vec![false; ny]; nz];
    let mut out = Vec::new();
    for i0 in 0..nz {
        for j0 in 0..ny {
            if seen[i0][j0] || !pick(i0, j0) {
                continue;
            }
            seen[i0][j0] = true;
            let mut stack = vec![(i0, j0)];
            let mut comp = Vec::new();
            while let Some((i, j)) = stack.pop() {
                comp.push((i, j));
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        let (ni, nj) = (i as i64 + di, j as i64 + dj);
                        if ni < 0 || nj < 0 || ni as usize >= nz || nj as usize >= ny {
                            continue;
                        }
                        let (ni, nj) = (ni as usize, nj as usize);
                        if !seen[ni][nj] && pick(ni, nj) {
                            seen[ni][nj] = true;
                            stack.push((ni, nj));
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
    }
    out
}

/// Grid cells crossed by the polyline through `points`, sampled densely.
pub fn band_cells(grid: &MapGrid, points: &[Vec2]) -> Vec<Cell> {
    let mut cells = Vec::new();
    for w in points.windows(2) {
        let len = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
        let n = ((len / grid.resolution) * 8.0).ceil().max(1.0) as usize;
        for k in 0..=n {
            let s = k as f64 / n as f64;
            let p = [w[0][0] + s * (w[1][0] - w[0][0]), w[0][1] + s * (w[1][1] - w[0][1])];
            if let Some(c) = grid.cell_of(p) {
                cells.push(c);
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RehabRegionReport {
    pub deficit_components: usize,
    /// Highest z among sub-threshold cells.
    pub deficit_top_z: Option<f64>,
    /// Lowest point of the band path (the seated harness height).
    pub band_bottom_z: f64,
    /// Fraction of band cells that are reachable and meet the requirement.
    pub band_coverage: f64,
    pub pass: bool,
}

/// Sub-threshold region is one component whose cells all lie below the lowest
/// point of the band path, and the band meets the requirement on at least
/// `min_coverage` of its cells.
pub fn rehab_region_report(map: &CapabilityMap, path: &[Vec2], min_coverage: f64) -> RehabRegionReport {
    let band = band_cells(&map.grid, path);
    let (nz, ny) = (map.grid.nz(), map.grid.ny());
    let below = |i: usize, j: usize| map.reachable(i, j) && map.get(i, j).unwrap_or(0.0) < map.requirement;
    let comps = components(nz, ny, below);
    let deficit_top_z = comps.iter().flatten().map(|&(i, _)| map.grid.z(i)).reduce(f64::max);
    let band_bottom_z = path.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
    let ok = band.iter().filter(|&&(i, j)| map.reachable(i, j) && map.get(i, j).unwrap_or(0.0) >= map.requirement).count();
    let band_coverage = if band.is_empty() { 0.0 } else { ok as f64 / band.len() as f64 };
    let confined = deficit_top_z.is_some_and(|z| z < band_bottom_z);
    RehabRegionReport {
        deficit_components: comps.len(),
        deficit_top_z,
        band_bottom_z,
        band_coverage,
        pass: comps.len() == 1 && confined && band_coverage >= min_coverage,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferRegionReport {
    pub deficit_components: usize,
    pub deficit_cells: usize,
    /// Some deficit cell has an unreachable (or off-grid) forward neighbour.
    pub touches_forward_reach: bool,
    pub intersects_band: bool,
    pub pass: bool,
}

pub fn transfer_region_report(map: &CapabilityMap, path: &[Vec2]) -> TransferRegionReport {
    let band = band_cells(&map.grid, path);
    let (nz, ny) = (map.grid.nz(), map.grid.ny());
    let below = |i: usize, j: usize| map.reachable(i, j) && map.get(i, j).unwrap_or(0.0) < map.requirement;
    let comps = components(nz, ny, below);
    let cells: Vec<Cell> = comps.iter().flatten().copied().collect();
    let touches_forward_reach = cells.iter().any(|&(i, j)| j + 1 >= ny || !map.reachable(i, j + 1));
    let intersects_band = band.iter().any(|&(i, j)| below(i, j));
    TransferRegionReport {
        deficit_components: comps.len(),
        deficit_cells: cells.len(),
        touches_forward_reach,
        intersects_band,
        pass: comps.len() == 1 && touches_forward_reach && !intersects_band,
    }
}
