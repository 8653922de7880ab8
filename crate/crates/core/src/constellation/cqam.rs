//! Circular QAM constructions with `q` shells of `q` points each.
//!
//! Every construction starts from shell 0 at radius 1 and phase 0, so the
//! reference distance is the shell-0 chord `d = 2 sin(pi/q)`. Shells are
//! then stacked outwards. The greedy family scans the radius upwards in
//! steps of `radius_step * d` and, at each radius, a grid of `phase_grid`
//! phase offsets over one sector `[0, 2pi/q)`; the first radius at which some
//! offset keeps every new point at least `d` away from all earlier points
//! wins. Outputs are normalized to unit mean power.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{invalid_param, Constellation, ConstellationError, Result};

pub const DEFAULT_PHASE_GRID: usize = 256;
/// Radius scan step, in units of the shell-0 chord.
pub const DEFAULT_RADIUS_STEP: f64 = 1e-3;
/// The scan gives up after moving this many chords past the previous shell.
const RADIUS_BUDGET: f64 = 100.0;
const MAX_Q: usize = 64;

/// One ring of a CQAM: `q` points at `radius * exp(i (phase + 2 pi j / q))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shell {
    pub radius: f64,
    pub phase: f64,
}

fn check_q(q: usize) -> Result<()> {
    if !(2..=MAX_Q).contains(&q) {
        return invalid_param(format!(
            "CQAM symmetry order q must satisfy 2 <= q <= {MAX_Q}, got {q}"
        ));
    }
    Ok(())
}

fn chord(q: usize) -> f64 {
    2.0 * (PI / q as f64).sin()
}

/// Assembles and normalizes a ring constellation. Point `k * q + j` is the
/// `j`-th point of shell `k` and carries the symbolic label `(j, k)`.
pub(crate) fn from_shells(name: String, q: usize, shells: &[Shell]) -> Result<Constellation> {
    let sector = 2.0 * PI / q as f64;
    let mut points = Vec::with_capacity(q * shells.len());
    let mut labels = Vec::with_capacity(q * shells.len());
    for (k, s) in shells.iter().enumerate() {
        for j in 0..q {
            points.push(Complex64::from_polar(s.radius, s.phase + sector * j as f64));
            labels.push(vec![j as u16, k as u16]);
        }
    }
    Ok(Constellation::uniform(name, q, points)?
        .with_symbolic_labels(labels)?
        .normalize())
}

/// Default star spacing: adjacent shells one shell-0 chord apart.
pub fn star_default_gap(q: usize) -> f64 {
    chord(q.max(2))
}

/// Star (APSK-like) CQAM: phase-aligned shells at radii
/// `r0 * (1 + k * shell_gap)`, `k = 0..q`.
pub fn make_cqam_star(q: usize, shell_gap: f64) -> Result<Constellation> {
    check_q(q)?;
    if !(shell_gap > 0.0 && shell_gap.is_finite()) {
        return invalid_param(format!("shell gap must be positive, got {shell_gap}"));
    }
    let shells: Vec<Shell> = (0..q)
        .map(|k| Shell {
            radius: 1.0 + k as f64 * shell_gap,
            phase: 0.0,
        })
        .collect();
    from_shells(format!("{}-CQAM-star", q * q), q, &shells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhaseScore {
    /// Largest distance to the nearest existing point.
    Nearest,
    /// Largest second-smallest distinct distance, then nearest.
    SecondNearest,
}

#[derive(Debug, Clone, Copy)]
struct ShellRule {
    phase_grid: usize,
    radius_step: f64,
    score: PhaseScore,
    /// Admissible offsets are `[0, phase_window * 2pi/q)`.
    phase_window: f64,
    /// Place shell 1 as a scaled copy of shell 0, one chord further out.
    scaled_second_shell: bool,
}

/// Distances from `c` to every point of the existing shells, unsorted.
fn distances(c: Complex64, shells: &[Shell], q: usize, out: &mut Vec<f64>) {
    let sector = 2.0 * PI / q as f64;
    out.clear();
    for s in shells {
        for j in 0..q {
            out.push((c - Complex64::from_polar(s.radius, s.phase + sector * j as f64)).norm());
        }
    }
}

/// Distance from `radius * exp(i phase)` to the nearest point of a full shell.
fn nearest_on_shell(radius: f64, phase: f64, s: &Shell, sector: f64) -> f64 {
    let delta = (phase - s.phase).rem_euclid(sector);
    let delta = delta.min(sector - delta);
    (radius * radius + s.radius * s.radius - 2.0 * radius * s.radius * delta.cos())
        .max(0.0)
        .sqrt()
}

fn grow_shells(q: usize, rule: ShellRule) -> Result<Vec<Shell>> {
    check_q(q)?;
    if rule.phase_grid < 8 {
        return invalid_param(format!(
            "phase grid must have at least 8 points, got {}",
            rule.phase_grid
        ));
    }
    if !(rule.radius_step > 0.0 && rule.radius_step.is_finite()) {
        return invalid_param(format!(
            "radius step must be positive, got {}",
            rule.radius_step
        ));
    }
    let sector = 2.0 * PI / q as f64;
    let d_min = chord(q);
    let step = rule.radius_step * d_min;
    let phases: Vec<f64> = (0..rule.phase_grid)
        .map(|j| j as f64 * sector / rule.phase_grid as f64)
        .filter(|&ph| ph < rule.phase_window * sector - 1e-15 || ph == 0.0)
        .collect();

    let mut shells = vec![Shell {
        radius: 1.0,
        phase: 0.0,
    }];
    let mut scratch = Vec::new();
    for k in 1..q {
        let prev = shells[k - 1].radius;
        if k == 1 && rule.scaled_second_shell {
            shells.push(Shell {
                radius: prev + d_min,
                phase: 0.0,
            });
            continue;
        }
        let limit = prev + RADIUS_BUDGET * d_min;
        let mut n = 0u64;
        let chosen = loop {
            n += 1;
            let r = prev + n as f64 * step;
            if r > limit {
                return Err(ConstellationError::Construction(format!(
                    "no admissible position for shell {k} within {RADIUS_BUDGET} d_min of shell {}",
                    k - 1
                )));
            }
            if 2.0 * r * (PI / q as f64).sin() < d_min {
                continue;
            }
            // (primary, secondary, phase); strict improvement only, so the
            // smallest phase wins ties
            let mut best: Option<(f64, f64, f64)> = None;
            for &ph in &phases {
                let d1 = shells
                    .iter()
                    .map(|s| nearest_on_shell(r, ph, s, sector))
                    .fold(f64::INFINITY, f64::min);
                if d1 + 1e-12 < d_min {
                    continue;
                }
                let key = match rule.score {
                    PhaseScore::Nearest => (d1, 0.0),
                    PhaseScore::SecondNearest => {
                        distances(Complex64::from_polar(r, ph), &shells, q, &mut scratch);
                        let d2 = scratch
                            .iter()
                            .copied()
                            .filter(|&d| d > d1 + 1e-9)
                            .fold(f64::INFINITY, f64::min);
                        (d2, d1)
                    }
                };
                let better = match best {
                    None => true,
                    Some((a, b, _)) => key.0 > a || (key.0 == a && key.1 > b),
                };
                if better {
                    best = Some((key.0, key.1, ph));
                }
            }
            if let Some((_, _, ph)) = best {
                break Shell {
                    radius: r,
                    phase: ph,
                };
            }
        };
        shells.push(chosen);
    }
    Ok(shells)
}

/// Minimum-distance greedy CQAM: each shell sits at the smallest scanned
/// radius admitting a phase offset that keeps the shell-0 chord as minimum
/// distance; among admissible offsets the one farthest from its nearest
/// neighbour is taken. `radius_step` is relative to the shell-0 chord.
pub fn make_cqam_greedy(q: usize, phase_grid: usize, radius_step: f64) -> Result<Constellation> {
    let shells = grow_shells(
        q,
        ShellRule {
            phase_grid,
            radius_step,
            score: PhaseScore::Nearest,
            phase_window: 1.0,
            scaled_second_shell: false,
        },
    )?;
    from_shells(format!("{}-CQAM-greedy", q * q), q, &shells)
}

/// Two-distance CQAM: shell 1 is shell 0 scaled out by one chord, later
/// shells are placed like the greedy construction but admissible offsets
/// are ranked by the second-smallest distance to the existing points.
pub fn make_cqam_two_dist(q: usize) -> Result<Constellation> {
    let shells = grow_shells(
        q,
        ShellRule {
            phase_grid: DEFAULT_PHASE_GRID,
            radius_step: DEFAULT_RADIUS_STEP,
            score: PhaseScore::SecondNearest,
            phase_window: 1.0,
            scaled_second_shell: true,
        },
    )?;
    from_shells(format!("{}-CQAM-2dist", q * q), q, &shells)
}

/// Hybrid CQAM: the two-distance rule with every shell offset confined to
/// the first quarter of its angular sector, so each point stays close to
/// the sector's leading edge.
pub fn make_cqam_hybrid(q: usize) -> Result<Constellation> {
    let shells = grow_shells(
        q,
        ShellRule {
            phase_grid: DEFAULT_PHASE_GRID,
            radius_step: DEFAULT_RADIUS_STEP,
            score: PhaseScore::SecondNearest,
            phase_window: 0.25,
            scaled_second_shell: true,
        },
    )?;
    from_shells(format!("{}-CQAM-hybrid", q * q), q, &shells)
}
