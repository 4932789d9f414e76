//! Two DP engines over the reduced state space.
//!
//! `run_reduced` is the general one: states live in a map, coefficients in
//! any ring. `try_planar` is a flat-array mod-p path for the common planar
//! shapes (at most two tracked axes, one modulus, unit weights); it exists
//! because the map engine is an order of magnitude too slow for the long
//! benchmark runs.

use super::{reduce_state, EnumerateError, EvalPoint, EvalVar, ReducedLevels, StateDescriptor};
use crate::model::Model;
use crate::ring::{PrimeField, Ring, WeightMap};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub(super) fn reduced_class(
    model: &Model,
    desc: &StateDescriptor,
    state: &[i64],
    n: i64,
) -> Vec<i64> {
    let t = desc.tracked_axes.len();
    model
        .residue_polys
        .iter()
        .zip(&model.moduli)
        .map(|(p, &m)| {
            let mut v = p.constant + p.time * n;
            for (k, &axis) in desc.tracked_axes.iter().enumerate() {
                v += p.position[axis] * state[k];
            }
            for (k, &(axis, _)) in desc.collapsed_axes.iter().enumerate() {
                v += p.position[axis] * state[t + k];
            }
            v.rem_euclid(m)
        })
        .collect()
}

struct PreparedStep<E> {
    tracked_delta: Vec<i64>,
    collapsed_delta: Vec<i64>,
    weight: E,
}

pub(crate) fn run_reduced<R: WeightMap>(
    model: &Model,
    n_max: usize,
    ring: &R,
    eval: &EvalPoint,
    limit: u128,
) -> Result<ReducedLevels<R>, EnumerateError> {
    let desc = reduce_state(model, eval);
    let tracked_n = desc.tracked_axes.len();

    // fold constants of untracked axes into the step weights
    let mut table: BTreeMap<Vec<i64>, Vec<PreparedStep<R::Elem>>> = BTreeMap::new();
    for (class, steps) in &model.step_sets {
        let mut prepared = Vec::new();
        for step in steps {
            let mut w = step.weight.clone();
            for axis in 0..model.dimension {
                if desc.tracked_axes.contains(&axis) {
                    continue;
                }
                let v = step.disp[axis];
                if v == 0 {
                    continue;
                }
                let c = match &eval.0[axis] {
                    EvalVar::Const(c) => c,
                    EvalVar::Symbolic => unreachable!("symbolic axes are tracked"),
                };
                if c.is_zero() {
                    if v < 0 {
                        return Err(EnumerateError::InvalidEval(format!(
                            "axis {} is evaluated at zero but takes negative steps",
                            axis
                        )));
                    }
                    w = BigRational::zero();
                    break;
                }
                w *= super::rational_pow(c, v);
            }
            if w.is_zero() {
                continue;
            }
            let weight = ring.map_weight(&w).ok_or_else(|| {
                EnumerateError::DomainWeight(format!("weight {} has no image in the domain", w))
            })?;
            prepared.push(PreparedStep {
                tracked_delta: desc.tracked_axes.iter().map(|&a| step.disp[a]).collect(),
                collapsed_delta: desc.collapsed_axes.iter().map(|&(a, _)| step.disp[a]).collect(),
                weight,
            });
        }
        table.insert(class.clone(), prepared);
    }

    let mut start_state: Vec<i64> = desc.tracked_axes.iter().map(|&a| model.start[a]).collect();
    for &(axis, m) in &desc.collapsed_axes {
        start_state.push(model.start[axis].rem_euclid(m));
    }

    let mut levels: Vec<BTreeMap<Vec<i64>, R::Elem>> = Vec::with_capacity(n_max + 1);
    let mut cur = BTreeMap::new();
    cur.insert(start_state.clone(), ring.one());
    let mut total: u128 = 1;
    levels.push(cur.clone());

    for n in 1..=n_max {
        let mut next: BTreeMap<Vec<i64>, R::Elem> = BTreeMap::new();
        'state: for (state, val) in &cur {
            let class = reduced_class(model, &desc, state, (n - 1) as i64);
            let Some(steps) = table.get(&class) else { continue 'state };
            for st in steps {
                let mut key = state.clone();
                let mut dead = false;
                for (k, &d) in st.tracked_delta.iter().enumerate() {
                    key[k] += d;
                    if desc.tracked_axes[k] < model.nonneg_axes && key[k] < 0 {
                        dead = true;
                        break;
                    }
                }
                if dead {
                    continue;
                }
                for (k, &d) in st.collapsed_delta.iter().enumerate() {
                    let m = desc.collapsed_axes[k].1;
                    key[tracked_n + k] = (key[tracked_n + k] + d).rem_euclid(m);
                }
                let prod = ring.mul(val, &st.weight);
                match next.get_mut(&key) {
                    Some(e) => *e = ring.add(e, &prod),
                    None => {
                        next.insert(key, prod);
                    }
                }
            }
        }
        total += next.len() as u128;
        if total > limit {
            return Err(EnumerateError::MemoryBound { needed: total, limit });
        }
        levels.push(next.clone());
        cur = next;
    }

    Ok(ReducedLevels { descriptor: desc, start: start_state, levels })
}

struct PlanarStep {
    d_out: i64,
    d_in: i64,
    slab_map: Vec<usize>,
    /// per residue class: does this displacement belong to that class's set
    active: Vec<bool>,
}

/// Flat-array engine. Returns None when the model or evaluation point does
/// not fit its shape, in which case the caller falls back to `run_reduced`.
pub(crate) fn try_planar(
    model: &Model,
    n_max: usize,
    p: u64,
    eval: &EvalPoint,
    limit: u128,
) -> Option<Result<Vec<u64>, EnumerateError>> {
    if model.moduli.len() != 1 {
        return None;
    }
    let m = model.moduli[0];
    if m < 1 || m > 4096 {
        return None;
    }
    let desc = reduce_state(model, eval);
    if desc.tracked_axes.len() > 2 {
        return None;
    }
    if desc.tracked_axes.iter().any(|&a| a >= model.nonneg_axes) {
        // symbolic free axes want the map engine's exact coordinates
        return None;
    }
    // unit weights only: the accumulator adds raw u32 counts
    for steps in model.step_sets.values() {
        if steps.iter().any(|s| !s.weight.is_one()) {
            return None;
        }
    }
    for (axis, e) in eval.0.iter().enumerate() {
        if axis >= model.nonneg_axes {
            match e {
                EvalVar::Const(c) if c.is_one() => {}
                _ => return None,
            }
        }
    }

    let field = PrimeField::new(p);
    let poly = &model.residue_polys[0];

    // axis geometry: outer tracked axis (if rank 2), inner tracked axis
    let (out_axis, in_axis) = match desc.tracked_axes.len() {
        2 => (Some(desc.tracked_axes[0]), Some(desc.tracked_axes[1])),
        1 => (None, Some(desc.tracked_axes[0])),
        _ => (None, None),
    };
    let up = |axis: Option<usize>| -> i64 {
        axis.map(|a| {
            model
                .step_sets
                .values()
                .flatten()
                .map(|s| s.disp[a].max(0))
                .max()
                .unwrap_or(0)
        })
        .unwrap_or(0)
    };
    let start_out = out_axis.map(|a| model.start[a]).unwrap_or(0);
    let start_in = in_axis.map(|a| model.start[a]).unwrap_or(0);
    let eo_cap = (start_out + up(out_axis) * n_max as i64 + 1) as usize;
    let ei_cap = (start_in + up(in_axis) * n_max as i64 + 1) as usize;

    let slab_dims: Vec<i64> = desc.collapsed_axes.iter().map(|&(_, m)| m).collect();
    let slabs: usize = slab_dims.iter().product::<i64>().max(1) as usize;

    let cells = slabs as u128 * eo_cap as u128 * ei_cap as u128;
    if cells > limit {
        return Some(Err(EnumerateError::MemoryBound { needed: cells, limit }));
    }
    if cells > (isize::MAX / 16) as u128 {
        return None;
    }

    // distinct displacements with per-class membership
    let mut disps: Vec<(Vec<i64>, Vec<bool>)> = Vec::new();
    for (class, steps) in &model.step_sets {
        let r = class[0] as usize;
        for s in steps {
            match disps.iter_mut().find(|(d, _)| *d == s.disp) {
                Some((_, act)) => act[r] = true,
                None => {
                    let mut act = vec![false; m as usize];
                    act[r] = true;
                    disps.push((s.disp.clone(), act));
                }
            }
        }
    }
    if disps.len() as u64 * (p - 1) >= u32::MAX as u64 {
        return None;
    }

    let decode_slab = |slab: usize| -> Vec<i64> {
        let mut rest = slab as i64;
        let mut out = Vec::with_capacity(slab_dims.len());
        for &d in slab_dims.iter().rev() {
            out.push(rest % d);
            rest /= d;
        }
        out.reverse();
        out
    };
    let encode_slab = |vals: &[i64]| -> usize {
        let mut idx = 0i64;
        for (v, &d) in vals.iter().zip(&slab_dims) {
            idx = idx * d + v.rem_euclid(d);
        }
        idx as usize
    };

    let steps: Vec<PlanarStep> = disps
        .into_iter()
        .map(|(disp, active)| PlanarStep {
            d_out: out_axis.map(|a| disp[a]).unwrap_or(0),
            d_in: in_axis.map(|a| disp[a]).unwrap_or(0),
            slab_map: (0..slabs)
                .map(|s| {
                    let mut vals = decode_slab(s);
                    for (k, &(axis, _)) in desc.collapsed_axes.iter().enumerate() {
                        vals[k] += disp[axis];
                    }
                    encode_slab(&vals)
                })
                .collect(),
            active,
        })
        .collect();

    let slabc: Vec<i64> = (0..slabs)
        .map(|s| {
            let vals = decode_slab(s);
            desc.collapsed_axes
                .iter()
                .zip(&vals)
                .map(|(&(axis, _), &v)| poly.position[axis] * v)
                .sum::<i64>()
                .rem_euclid(m)
        })
        .collect();
    let a_out = out_axis.map(|a| poly.position[a]).unwrap_or(0).rem_euclid(m);
    let a_in = in_axis.map(|a| poly.position[a]).unwrap_or(0).rem_euclid(m);
    let pi = if a_in == 0 { 1 } else { m / num_integer::gcd(a_in, m) };

    // evaluation constants on the tracked axes, as modular power tables
    let mut pow_out: Option<Vec<u64>> = None;
    let mut pow_in: Option<Vec<u64>> = None;
    for (slot, axis, cap) in [
        (&mut pow_out, out_axis, eo_cap),
        (&mut pow_in, in_axis, ei_cap),
    ] {
        if let Some(a) = axis {
            if let EvalVar::Const(c) = &eval.0[a] {
                if !c.is_one() {
                    let Some(cm) = field.from_ratio(c.numer(), c.denom()) else {
                        return Some(Err(EnumerateError::DomainWeight(format!(
                            "constant {} has no image mod {}",
                            c, p
                        ))));
                    };
                    let mut tbl = Vec::with_capacity(cap);
                    let mut acc = 1u64;
                    for _ in 0..cap {
                        tbl.push(acc);
                        acc = field.mul(&acc, &cm);
                    }
                    *slot = Some(tbl);
                }
            }
        }
    }

    let row = |slab: usize, io: usize| (slab * eo_cap + io) * ei_cap;
    let mut cur = vec![0u32; slabs * eo_cap * ei_cap];
    let mut next = vec![0u32; slabs * eo_cap * ei_cap];
    cur[row(encode_slab(
        &desc.collapsed_axes.iter().map(|&(a, _)| model.start[a]).collect::<Vec<_>>(),
    ), start_out as usize) + start_in as usize] = 1;

    let ext = |n: usize, start: i64, rate: i64| (start + rate * n as i64 + 1) as usize;
    let up_out = up(out_axis);
    let up_in = up(in_axis);

    let aggregate = |buf: &[u32], n: usize| -> u64 {
        let eo = ext(n, start_out, up_out).min(eo_cap);
        let ei = ext(n, start_in, up_in).min(ei_cap);
        let mut acc = 0u64;
        for slab in 0..slabs {
            for io in 0..eo {
                let r = &buf[row(slab, io)..row(slab, io) + ei];
                let mut rsum = 0u64;
                match &pow_in {
                    None => {
                        for &v in r {
                            rsum += v as u64;
                        }
                        rsum %= p;
                    }
                    Some(tbl) => {
                        for (ii, &v) in r.iter().enumerate() {
                            rsum += v as u64 * tbl[ii];
                            if rsum >= 1 << 62 {
                                rsum %= p;
                            }
                        }
                        rsum %= p;
                    }
                }
                if let Some(tbl) = &pow_out {
                    rsum = field.mul(&rsum, &tbl[io]);
                }
                acc = field.add(&acc, &rsum);
            }
        }
        acc
    };

    let mut out = Vec::with_capacity(n_max + 1);
    out.push(aggregate(&cur, 0));

    for n in 1..=n_max {
        let eo_prev = ext(n - 1, start_out, up_out).min(eo_cap);
        let ei_prev = ext(n - 1, start_in, up_in).min(ei_cap);
        let eo = ext(n, start_out, up_out).min(eo_cap);
        let ei = ext(n, start_in, up_in).min(ei_cap);
        for slab in 0..slabs {
            for io in 0..eo {
                let b = row(slab, io);
                next[b..b + ei].fill(0);
            }
        }
        let k_time = (poly.constant + poly.time * (n as i64 - 1)).rem_euclid(m);
        for st in &steps {
            let io_lo = (-st.d_out).max(0);
            let io_hi = (eo_prev as i64).min(eo as i64 - st.d_out);
            let ii_lo = (-st.d_in).max(0);
            let ii_hi = (ei_prev as i64).min(ei as i64 - st.d_in);
            if io_lo >= io_hi || ii_lo >= ii_hi {
                continue;
            }
            for slab in 0..slabs {
                let dst_slab = st.slab_map[slab];
                for io in io_lo..io_hi {
                    let k0 = (k_time + a_out * io + slabc[slab]).rem_euclid(m);
                    let sb = row(slab, io as usize);
                    let db = row(dst_slab, (io + st.d_out) as usize);
                    let (lo, hi) = (ii_lo as usize, ii_hi as usize);
                    let shift = st.d_in;
                    if pi == 1 {
                        if st.active[k0 as usize] {
                            let src = &cur[sb + lo..sb + hi];
                            let dst = &mut next
                                [db + (lo as i64 + shift) as usize..db + (hi as i64 + shift) as usize];
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d += s;
                            }
                        }
                    } else {
                        for phase in 0..pi {
                            let r = (k0 + a_in * (lo as i64 + phase)).rem_euclid(m) as usize;
                            if !st.active[r] {
                                continue;
                            }
                            let mut ii = lo + phase as usize;
                            while ii < hi {
                                next[db + (ii as i64 + shift) as usize] += cur[sb + ii];
                                ii += pi as usize;
                            }
                        }
                    }
                }
            }
        }
        for slab in 0..slabs {
            for io in 0..eo {
                let b = row(slab, io);
                for v in &mut next[b..b + ei] {
                    *v %= p as u32;
                }
            }
        }
        out.push(aggregate(&next, n));
        std::mem::swap(&mut cur, &mut next);
    }

    Some(Ok(out))
}
