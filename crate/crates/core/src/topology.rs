//! Neighbourhood topologies.
//!
//! Neighbours are fixed particle IDs, never spatial neighbours. Every
//! neighbourhood contains the focal particle itself, so a particle's local
//! best is never worse than its own best.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    /// Fully connected.
    Global,
    /// Ring with `nn` neighbours, `nn / 2` on each side.
    Ring { nn: usize },
    /// Ring whose neighbour count grows linearly from `nni` to `nnf`.
    DynamicRing { nni: usize, nnf: usize },
    /// One hub connected to every particle; the others see only the hub.
    Wheel { hub: usize },
    /// Per step, each particle draws `k` uniform on `{0, .., m-1}` and then
    /// `k` distinct other particles.
    Random,
}

/// Indices of a particle's neighbourhood, focal particle included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourSet {
    members: Vec<usize>,
}

impl NeighbourSet {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(&index)
    }

    /// Members in ascending order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }
}

/// Neighbour count of the dynamic ring at step `t` of `total_steps`:
/// `round(nni + (nnf - nni) * t / (total_steps - 1))`, halves rounded up.
pub fn dynamic_degree(nni: usize, nnf: usize, t: usize, total_steps: usize) -> usize {
    if total_steps <= 1 || nnf <= nni {
        return nni;
    }
    let span = (nnf - nni) as u128;
    let denom = (total_steps - 1) as u128;
    let t = t.min(total_steps - 1) as u128;
    nni + ((2 * span * t + denom) / (2 * denom)) as usize
}

/// Index of the member with the lowest personal-best conflict; ties go to
/// the lowest index.
pub fn lbest_index(pbest_conflicts: &[f64], members: &[usize]) -> usize {
    let mut best = members[0];
    for &k in &members[1..] {
        let (ck, cb) = (pbest_conflicts[k], pbest_conflicts[best]);
        if ck < cb || (ck == cb && k < best) {
            best = k;
        }
    }
    best
}

impl Topology {
    /// Parses `global`, `ring:nn=2`, `ring-dynamic:nni=2,nnf=m-1`, `wheel`
    /// (optionally `wheel:hub=3`) or `random`. `m` is the swarm size, used
    /// for the symbolic `m-1` and for validation.
    pub fn parse(s: &str, m: usize) -> Result<Self> {
        let lowered = s.trim().to_ascii_lowercase();
        let (name, params) = crate::params::split_params(&lowered)?;
        let count = |key: &str, default: Option<usize>| -> Result<usize> {
            match params.iter().find(|(k, _)| k == key) {
                Some((_, v)) => parse_count(v, m),
                None => default.ok_or_else(|| Error::config(format!("topology {name} needs {key}="))),
            }
        };
        let known = |allowed: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
                Some((k, _)) => Err(Error::config(format!("unknown parameter {k} for topology {name}"))),
                None => Ok(()),
            }
        };
        let topo = match name {
            "global" => {
                known(&[])?;
                Self::Global
            }
            "ring" => {
                known(&["nn"])?;
                Self::Ring { nn: count("nn", Some(2))? }
            }
            "ring-dynamic" | "dynamic-ring" => {
                known(&["nni", "nnf"])?;
                Self::DynamicRing {
                    nni: count("nni", Some(2))?,
                    nnf: count("nnf", Some(m.saturating_sub(1)))?,
                }
            }
            "wheel" => {
                known(&["hub"])?;
                Self::Wheel { hub: count("hub", Some(0))? }
            }
            "random" => {
                known(&[])?;
                Self::Random
            }
            other => return Err(Error::config(format!("unknown topology {other:?}"))),
        };
        topo.validate(m)?;
        Ok(topo)
    }

    /// Checks the topology against a swarm of size `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        if m < 3 {
            return Err(Error::domain(format!("swarm size must be at least 3, got {m}")));
        }
        match *self {
            Self::Global | Self::Random => Ok(()),
            Self::Ring { nn } => {
                if nn < 2 || nn % 2 != 0 || nn > m - 1 {
                    Err(Error::domain(format!(
                        "ring needs an even nn with 2 <= nn <= {}, got {nn}",
                        m - 1
                    )))
                } else {
                    Ok(())
                }
            }
            Self::DynamicRing { nni, nnf } => {
                if nni == 0 || nni > nnf || nnf > m - 1 {
                    Err(Error::domain(format!(
                        "dynamic ring needs 1 <= nni <= nnf <= {}, got nni={nni}, nnf={nnf}",
                        m - 1
                    )))
                } else {
                    Ok(())
                }
            }
            Self::Wheel { hub } => {
                if hub >= m {
                    Err(Error::domain(format!("wheel hub {hub} outside swarm of {m}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Whether neighbourhoods are drawn at random (and so consume RNG).
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Self::Random)
    }

    /// Row label used in statistics tables.
    pub fn label(&self) -> String {
        match *self {
            Self::Global => "GLOBAL".into(),
            Self::Ring { nn } => format!("RING nn = {nn}"),
            Self::DynamicRing { nni, nnf } => format!("RING nni = {nni} nnf = {nnf}"),
            Self::Wheel { hub: 0 } => "WHEEL".into(),
            Self::Wheel { hub } => format!("WHEEL hub = {hub}"),
            Self::Random => "RANDOM".into(),
        }
    }

    /// Neighbourhood of particle `i` at step `t` of `total_steps` in a swarm
    /// of `m` particles.
    pub fn neighbours<R: Rng + ?Sized>(
        &self,
        i: usize,
        t: usize,
        total_steps: usize,
        m: usize,
        rng: &mut R,
    ) -> Result<NeighbourSet> {
        self.validate(m)?;
        if i >= m {
            return Err(Error::domain(format!("particle {i} outside swarm of {m}")));
        }
        if total_steps > 0 && t >= total_steps {
            return Err(Error::domain(format!("step {t} outside run of {total_steps}")));
        }
        let mut scratch = NeighbourScratch::new(m);
        let mut members = Vec::with_capacity(m);
        self.fill(i, t, total_steps, m, rng, &mut scratch, &mut members);
        Ok(NeighbourSet { members })
    }

    /// Writes the neighbourhood into `out` without validation. The engine's
    /// hot path.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn fill<R: Rng + ?Sized>(
        &self,
        i: usize,
        t: usize,
        total_steps: usize,
        m: usize,
        rng: &mut R,
        scratch: &mut NeighbourScratch,
        out: &mut Vec<usize>,
    ) {
        out.clear();
        match *self {
            Self::Global => out.extend(0..m),
            Self::Ring { nn } => push_ring(i, nn, m, out),
            Self::DynamicRing { nni, nnf } => {
                push_ring(i, dynamic_degree(nni, nnf, t, total_steps), m, out)
            }
            Self::Wheel { hub } => {
                if i == hub {
                    out.extend(0..m);
                } else {
                    out.push(hub);
                    out.push(i);
                }
            }
            Self::Random => {
                out.push(i);
                let k = rng.gen_range(0..m);
                let pool = scratch.others(i, m);
                // partial Fisher-Yates over the m - 1 other particles
                for s in 0..k {
                    let r = rng.gen_range(s..pool.len());
                    pool.swap(s, r);
                    out.push(pool[s]);
                }
            }
        }
    }
}

/// `i` plus `ceil(nn/2)` successors and `floor(nn/2)` predecessors.
fn push_ring(i: usize, nn: usize, m: usize, out: &mut Vec<usize>) {
    out.push(i);
    for d in 1..=nn.div_ceil(2) {
        out.push((i + d) % m);
    }
    for d in 1..=nn / 2 {
        out.push((i + m - d) % m);
    }
}

fn parse_count(v: &str, m: usize) -> Result<usize> {
    let v = v.replace(' ', "");
    if v == "m-1" {
        return Ok(m.saturating_sub(1));
    }
    if v == "m" {
        return Ok(m);
    }
    v.parse::<usize>()
        .map_err(|_| Error::config(format!("expected a neighbour count, got {v:?}")))
}

/// Reusable buffer for random neighbourhood draws.
#[derive(Debug, Clone, Default)]
pub(crate) struct NeighbourScratch {
    pool: Vec<usize>,
}

impl NeighbourScratch {
    pub(crate) fn new(m: usize) -> Self {
        Self {
            pool: Vec::with_capacity(m),
        }
    }

    fn others(&mut self, i: usize, m: usize) -> &mut [usize] {
        self.pool.clear();
        self.pool.extend(0..i);
        self.pool.extend(i + 1..m);
        &mut self.pool
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Global => f.write_str("global"),
            Self::Ring { nn } => write!(f, "ring:nn={nn}"),
            Self::DynamicRing { nni, nnf } => write!(f, "ring-dynamic:nni={nni},nnf={nnf}"),
            Self::Wheel { hub } => write!(f, "wheel:hub={hub}"),
            Self::Random => f.write_str("random"),
        }
    }
}
