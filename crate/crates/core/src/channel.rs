//! Budgeted corruption of symbol strings for fuzzing decoders: random
//! edits plus targeted attacks on the structure of concatenated codes,
//! all replayable from a recorded edit script.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::seqkit::{insdel_distance, SymbolString};

/// One edit against the *current* state of the string; scripts apply
/// sequentially, so positions are relative to the evolving word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edit {
    Delete { pos: usize },
    Insert { pos: usize, sym: u32 },
}

/// A replayable corruption: the ordered edit script plus the metadata
/// needed to regenerate or audit it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorruptionPlan {
    pub edits: Vec<Edit>,
    pub budget: usize,
    pub strategy: String,
    pub seed: u64,
}

impl CorruptionPlan {
    /// One edit per line — `D <pos>` or `I <pos> <symbol>` — preceded
    /// by a comment carrying the metadata.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# strategy={} seed={} budget={}\n",
            self.strategy, self.seed, self.budget
        );
        for e in &self.edits {
            match e {
                Edit::Delete { pos } => out.push_str(&format!("D {pos}\n")),
                Edit::Insert { pos, sym } => out.push_str(&format!("I {pos} {sym}\n")),
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut edits = Vec::new();
        let mut strategy = String::from("replay");
        let mut seed = 0u64;
        let mut budget = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                for token in comment.split_whitespace() {
                    if let Some((key, value)) = token.split_once('=') {
                        match key {
                            "strategy" => strategy = value.to_string(),
                            "seed" => seed = value.parse().unwrap_or(0),
                            "budget" => budget = value.parse().ok(),
                            _ => {}
                        }
                    }
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = || Error::InvalidInput(format!("bad edit line {line:?}"));
            match parts.next() {
                Some("D") => {
                    let pos = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
                    if parts.next().is_some() {
                        return Err(bad());
                    }
                    edits.push(Edit::Delete { pos });
                }
                Some("I") => {
                    let pos = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
                    let sym = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
                    if parts.next().is_some() {
                        return Err(bad());
                    }
                    edits.push(Edit::Insert { pos, sym });
                }
                _ => return Err(bad()),
            }
        }
        let budget = budget.unwrap_or(edits.len());
        if edits.len() > budget {
            return Err(Error::InvalidInput(format!(
                "script has {} edits but declares budget {budget}",
                edits.len()
            )));
        }
        Ok(CorruptionPlan {
            edits,
            budget,
            strategy,
            seed,
        })
    }
}

/// Replays a plan against a source word.
pub fn apply_plan(source: &SymbolString, plan: &CorruptionPlan) -> Result<SymbolString> {
    let mut work: Vec<u32> = source.syms().to_vec();
    for (i, e) in plan.edits.iter().enumerate() {
        match *e {
            Edit::Delete { pos } => {
                if pos >= work.len() {
                    return Err(Error::InvalidInput(format!(
                        "edit {i}: delete at {pos} beyond length {}",
                        work.len()
                    )));
                }
                work.remove(pos);
            }
            Edit::Insert { pos, sym } => {
                if pos > work.len() {
                    return Err(Error::InvalidInput(format!(
                        "edit {i}: insert at {pos} beyond length {}",
                        work.len()
                    )));
                }
                if sym >= source.k() {
                    return Err(Error::InvalidInput(format!(
                        "edit {i}: symbol {sym} outside alphabet {}",
                        source.k()
                    )));
                }
                work.insert(pos, sym);
            }
        }
    }
    SymbolString::new(work, source.k())
}

/// True iff the two words are within `budget` insertions+deletions of
/// each other.
pub fn verify_budget(c: &SymbolString, s: &SymbolString, budget: usize) -> Result<bool> {
    Ok(insdel_distance(c, s)? <= budget)
}

/// Attack shapes. The targeted ones carry the layout facts they aim at
/// (inner block length, buffer length), since the channel itself has no
/// access to code internals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Random positions, random ops, random inserted symbols.
    Uniform,
    /// Inserts runs of zeros into the middle of inner blocks to forge
    /// windows that look like buffers to a buffer scanner.
    BufferSpoof { block_len: usize, buffer_len: usize },
    /// Sprinkles ones across the zero chunks between blocks so the real
    /// buffers stop looking like buffers.
    ChunkKill {
        block_len: usize,
        buffer_len: usize,
        ones_per_chunk: usize,
    },
    /// Deletes a prefix of one inner block and stuffs garbage into
    /// another, to break window alignment.
    BlockShift { block_len: usize },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::BufferSpoof { .. } => "buffer-spoof",
            Strategy::ChunkKill { .. } => "chunk-kill",
            Strategy::BlockShift { .. } => "block-shift",
        }
    }
}

/// Corrupts `c` with at most `budget` edits under the given strategy.
/// Deterministic in (strategy, seed, input, budget); the output's
/// distance from `c` is re-verified before returning.
pub fn corrupt(
    c: &SymbolString,
    budget: usize,
    strategy: &Strategy,
    seed: u64,
) -> Result<(SymbolString, CorruptionPlan)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut work: Vec<u32> = c.syms().to_vec();
    let k = c.k();
    let edits = match strategy {
        Strategy::Uniform => uniform_edits(&mut work, k, budget, &mut rng),
        Strategy::BufferSpoof {
            block_len,
            buffer_len,
        } => buffer_spoof_edits(&mut work, budget, *block_len, *buffer_len, &mut rng),
        Strategy::ChunkKill {
            block_len,
            buffer_len,
            ones_per_chunk,
        } => chunk_kill_edits(
            &mut work,
            budget,
            *block_len,
            *buffer_len,
            *ones_per_chunk,
            &mut rng,
        ),
        Strategy::BlockShift { block_len } => {
            block_shift_edits(&mut work, k, budget, *block_len, &mut rng)
        }
    };
    let plan = CorruptionPlan {
        edits,
        budget,
        strategy: strategy.name().to_string(),
        seed,
    };
    let output = SymbolString::new_unchecked(work, k);
    if !verify_budget(c, &output, budget)? {
        return Err(Error::ContractViolation(format!(
            "strategy {} exceeded its edit budget {budget}",
            plan.strategy
        )));
    }
    Ok((output, plan))
}

fn uniform_edits(work: &mut Vec<u32>, k: u32, budget: usize, rng: &mut ChaCha20Rng) -> Vec<Edit> {
    let mut edits = Vec::with_capacity(budget);
    for _ in 0..budget {
        let insert = work.is_empty() || rng.random_bool(0.5);
        if insert {
            let pos = rng.random_range(0..=work.len());
            let sym = rng.random_range(0..k);
            work.insert(pos, sym);
            edits.push(Edit::Insert { pos, sym });
        } else {
            let pos = rng.random_range(0..work.len());
            work.remove(pos);
            edits.push(Edit::Delete { pos });
        }
    }
    edits
}

/// Block i occupies `[i*(m+B), i*(m+B)+m)` in the layout both buffered
/// strategies assume; the chunk behind it fills the rest of the period.
fn full_blocks(len: usize, block_len: usize, buffer_len: usize) -> Vec<usize> {
    let period = block_len + buffer_len;
    (0..)
        .map(|i| i * period)
        .take_while(|&start| start + block_len <= len)
        .collect()
}

fn buffer_spoof_edits(
    work: &mut Vec<u32>,
    budget: usize,
    block_len: usize,
    buffer_len: usize,
    rng: &mut ChaCha20Rng,
) -> Vec<Edit> {
    let mut edits = Vec::with_capacity(budget);
    let mut starts = full_blocks(work.len(), block_len, buffer_len);
    if starts.is_empty() {
        starts.push(0);
    }
    starts.shuffle(rng);
    let mut remaining = budget;
    let mut targets: Vec<usize> = Vec::new();
    for &start in &starts {
        if remaining == 0 {
            break;
        }
        let run = remaining.min(buffer_len.max(1));
        targets.push(start + (block_len / 2).min(work.len().saturating_sub(1)));
        remaining -= run;
    }
    // Apply in ascending position order, tracking the shift earlier
    // runs impose on later ones.
    targets.sort_unstable();
    let mut remaining = budget;
    let mut shift = 0usize;
    for target in targets {
        let run = remaining.min(buffer_len.max(1));
        let pos = (target + shift).min(work.len());
        for _ in 0..run {
            work.insert(pos, 0);
            edits.push(Edit::Insert { pos, sym: 0 });
        }
        shift += run;
        remaining -= run;
    }
    edits
}

fn chunk_kill_edits(
    work: &mut Vec<u32>,
    budget: usize,
    block_len: usize,
    buffer_len: usize,
    ones_per_chunk: usize,
    rng: &mut ChaCha20Rng,
) -> Vec<Edit> {
    let mut edits = Vec::with_capacity(budget);
    let period = block_len + buffer_len;
    let mut chunks: Vec<usize> = (0..)
        .map(|i| i * period + block_len)
        .take_while(|&start| start + buffer_len <= work.len())
        .collect();
    if chunks.is_empty() {
        return edits;
    }
    chunks.shuffle(rng);
    let per_chunk = ones_per_chunk.max(1);
    let mut picked: Vec<usize> = Vec::new();
    let mut remaining = budget;
    for &start in &chunks {
        if remaining == 0 {
            break;
        }
        picked.push(start);
        remaining -= per_chunk.min(remaining);
    }
    picked.sort_unstable();
    let mut remaining = budget;
    let mut shift = 0usize;
    for start in picked {
        let count = per_chunk.min(remaining);
        // Spread the ones evenly so no window of the chunk stays clean.
        for j in 0..count {
            let offset = (j + 1) * buffer_len / (count + 1);
            let pos = (start + shift + offset).min(work.len());
            work.insert(pos, 1);
            edits.push(Edit::Insert { pos, sym: 1 });
            shift += 1;
        }
        remaining -= count;
    }
    edits
}

fn block_shift_edits(
    work: &mut Vec<u32>,
    k: u32,
    budget: usize,
    block_len: usize,
    rng: &mut ChaCha20Rng,
) -> Vec<Edit> {
    let mut edits = Vec::with_capacity(budget);
    if budget == 0 || work.is_empty() {
        return edits;
    }
    let blocks = work.len() / block_len.max(1);
    let (del_block, ins_block) = if blocks >= 2 {
        let a = rng.random_range(0..blocks);
        let mut b = rng.random_range(0..blocks - 1);
        if b >= a {
            b += 1;
        }
        (a, b)
    } else {
        (0, 0)
    };
    let del_budget = (budget / 2).min(block_len).min(work.len());
    let del_pos = (del_block * block_len).min(work.len().saturating_sub(1));
    for _ in 0..del_budget {
        if del_pos >= work.len() {
            break;
        }
        work.remove(del_pos);
        edits.push(Edit::Delete { pos: del_pos });
    }
    let mut ins_pos = (ins_block * block_len).min(work.len());
    if ins_block > del_block {
        ins_pos = ins_pos.saturating_sub(edits.len()).min(work.len());
    }
    for _ in edits.len()..budget {
        let sym = rng.random_range(0..k);
        work.insert(ins_pos, sym);
        edits.push(Edit::Insert { pos: ins_pos, sym });
    }
    edits
}

/// Attributes each edit of a plan to one segment of the source word,
/// for instrumented counting arguments. `segments` are consecutive
/// lengths partitioning the source. A deletion charges the segment its
/// victim belongs to; an insertion charges the segment of the symbol at
/// the insertion point (the last segment when appending), and inserted
/// symbols inherit that attribution for later edits. Returns the
/// per-symbol owners of the corrupted word and the per-segment costs;
/// costs sum to the script length.
pub fn segment_map(segments: &[usize], plan: &CorruptionPlan) -> Result<(Vec<usize>, Vec<usize>)> {
    let total: usize = segments.iter().sum();
    let mut owner: Vec<usize> = Vec::with_capacity(total);
    for (seg, &len) in segments.iter().enumerate() {
        owner.extend(std::iter::repeat_n(seg, len));
    }
    let mut costs = vec![0usize; segments.len()];
    for (i, e) in plan.edits.iter().enumerate() {
        match *e {
            Edit::Delete { pos } => {
                if pos >= owner.len() {
                    return Err(Error::InvalidInput(format!(
                        "edit {i}: delete at {pos} beyond length {}",
                        owner.len()
                    )));
                }
                costs[owner[pos]] += 1;
                owner.remove(pos);
            }
            Edit::Insert { pos, .. } => {
                if pos > owner.len() {
                    return Err(Error::InvalidInput(format!(
                        "edit {i}: insert at {pos} beyond length {}",
                        owner.len()
                    )));
                }
                let seg = if pos < owner.len() {
                    owner[pos]
                } else {
                    owner.last().copied().unwrap_or(0)
                };
                costs[seg] += 1;
                owner.insert(pos, seg);
            }
        }
    }
    Ok((owner, costs))
}

/// The per-segment costs of [`segment_map`] alone.
pub fn segment_edit_costs(segments: &[usize], plan: &CorruptionPlan) -> Result<Vec<usize>> {
    Ok(segment_map(segments, plan)?.1)
}

/// Hill-climbing adversary: spends the budget in chunks, at each step
/// trying a few random edit bursts and keeping whichever maximizes
/// `probe` (a damage score over the corrupted word — higher is worse
/// for the decoder under attack).
pub fn corrupt_greedy<F>(
    c: &SymbolString,
    budget: usize,
    seed: u64,
    mut probe: F,
) -> Result<(SymbolString, CorruptionPlan)>
where
    F: FnMut(&SymbolString) -> f64,
{
    const CANDIDATES_PER_STEP: usize = 3;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let k = c.k();
    let mut current = c.syms().to_vec();
    let mut edits: Vec<Edit> = Vec::with_capacity(budget);
    let chunk = (budget / 8).max(1);
    while edits.len() < budget {
        let step = chunk.min(budget - edits.len());
        let mut best: Option<(f64, Vec<u32>, Vec<Edit>)> = None;
        for _ in 0..CANDIDATES_PER_STEP {
            let mut trial = current.clone();
            let trial_edits = uniform_edits(&mut trial, k, step, &mut rng);
            let score = probe(&SymbolString::new_unchecked(trial.clone(), k));
            if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                best = Some((score, trial, trial_edits));
            }
        }
        let (_, next, step_edits) = best.expect("at least one candidate");
        current = next;
        edits.extend(step_edits);
    }
    let output = SymbolString::new_unchecked(current, k);
    let plan = CorruptionPlan {
        edits,
        budget,
        strategy: "greedy".to_string(),
        seed,
    };
    if !verify_budget(c, &output, budget)? {
        return Err(Error::ContractViolation(format!(
            "greedy corruption exceeded its edit budget {budget}"
        )));
    }
    Ok((output, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqkit;

    fn w(text: &str, k: u32) -> SymbolString {
        seqkit::parse_word(text, k).unwrap()
    }

    #[test]
    fn zero_budget_is_identity() {
        let c = w("0110_0110".replace('_', "").as_str(), 2);
        for strategy in [
            Strategy::Uniform,
            Strategy::BufferSpoof {
                block_len: 4,
                buffer_len: 2,
            },
            Strategy::ChunkKill {
                block_len: 4,
                buffer_len: 2,
                ones_per_chunk: 1,
            },
            Strategy::BlockShift { block_len: 4 },
        ] {
            let (out, plan) = corrupt(&c, 0, &strategy, 1).unwrap();
            assert_eq!(out, c, "{}", strategy.name());
            assert!(plan.edits.is_empty());
        }
    }

    #[test]
    fn uniform_respects_length_envelope_and_budget() {
        let c = w("012012012012", 3);
        for seed in 0..50 {
            let b = (seed % 7) as usize;
            let (out, plan) = corrupt(&c, b, &Strategy::Uniform, seed).unwrap();
            assert!(out.len() >= c.len() - b && out.len() <= c.len() + b);
            assert!(plan.edits.len() <= b);
            assert!(verify_budget(&c, &out, b).unwrap());
        }
    }

    #[test]
    fn corruption_is_deterministic_per_seed() {
        let c = w("0110101101001011", 2);
        let s = Strategy::BufferSpoof {
            block_len: 5,
            buffer_len: 3,
        };
        let (a, pa) = corrupt(&c, 6, &s, 77).unwrap();
        let (b, pb) = corrupt(&c, 6, &s, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(pa, pb);
    }

    #[test]
    fn plans_replay_to_the_recorded_output() {
        let c = w("01101011010010110101", 2);
        let strategies = [
            Strategy::Uniform,
            Strategy::BufferSpoof {
                block_len: 6,
                buffer_len: 2,
            },
            Strategy::ChunkKill {
                block_len: 6,
                buffer_len: 2,
                ones_per_chunk: 2,
            },
            Strategy::BlockShift { block_len: 6 },
        ];
        for strategy in &strategies {
            for seed in 0..20 {
                let (out, plan) = corrupt(&c, 7, strategy, seed).unwrap();
                assert_eq!(apply_plan(&c, &plan).unwrap(), out, "{}", strategy.name());
            }
        }
    }

    #[test]
    fn plan_text_round_trip() {
        let c = w("0110101101001011", 2);
        let (_, plan) = corrupt(&c, 5, &Strategy::Uniform, 13).unwrap();
        let back = CorruptionPlan::from_text(&plan.to_text()).unwrap();
        assert_eq!(back, plan);

        assert!(CorruptionPlan::from_text("X 3\n").is_err());
        assert!(CorruptionPlan::from_text("D\n").is_err());
        assert!(CorruptionPlan::from_text("I 3\n").is_err());
        // More edits than the declared budget is a lie, not a plan.
        assert!(CorruptionPlan::from_text("# budget=1\nD 0\nD 0\n").is_err());
    }

    #[test]
    fn apply_plan_validates_positions_and_symbols() {
        let c = w("0101", 2);
        let del_far = CorruptionPlan {
            edits: vec![Edit::Delete { pos: 9 }],
            budget: 1,
            strategy: "t".into(),
            seed: 0,
        };
        assert!(apply_plan(&c, &del_far).is_err());
        let bad_sym = CorruptionPlan {
            edits: vec![Edit::Insert { pos: 0, sym: 5 }],
            budget: 1,
            strategy: "t".into(),
            seed: 0,
        };
        assert!(apply_plan(&c, &bad_sym).is_err());
    }

    #[test]
    fn verify_budget_matches_distance() {
        let a = w("00", 2);
        let b = w("11", 2);
        assert!(verify_budget(&a, &a, 0).unwrap());
        assert!(!verify_budget(&a, &b, 1).unwrap());
        assert!(verify_budget(&a, &b, 4).unwrap());
    }

    #[test]
    fn buffer_spoof_inserts_a_zero_run_inside_a_block() {
        // Blocks of 8 ones separated by 4-zero chunks.
        let mut syms = Vec::new();
        for i in 0..4 {
            syms.extend_from_slice(&[1u32; 8]);
            if i < 3 {
                syms.extend_from_slice(&[0u32; 4]);
            }
        }
        let c = SymbolString::new(syms, 2).unwrap();
        let (out, plan) = corrupt(
            &c,
            4,
            &Strategy::BufferSpoof {
                block_len: 8,
                buffer_len: 4,
            },
            3,
        )
        .unwrap();
        assert_eq!(plan.edits.len(), 4);
        // The output must contain a brand-new run of >= 4 zeros flanked
        // by ones (i.e. inside what used to be a block).
        let text: String = out.syms().iter().map(|s| s.to_string()).collect();
        assert!(text.contains("10000"), "no spoofed run in {text}");
    }

    #[test]
    fn chunk_kill_pollutes_every_targeted_chunk() {
        let mut syms = Vec::new();
        for i in 0..3 {
            syms.extend_from_slice(&[1u32; 6]);
            if i < 2 {
                syms.extend_from_slice(&[0u32; 6]);
            }
        }
        let c = SymbolString::new(syms, 2).unwrap();
        let (out, _) = corrupt(
            &c,
            4,
            &Strategy::ChunkKill {
                block_len: 6,
                buffer_len: 6,
                ones_per_chunk: 2,
            },
            5,
        )
        .unwrap();
        // No run of 6 zeros survives in full.
        let text: String = out.syms().iter().map(|s| s.to_string()).collect();
        assert!(!text.contains("000000"), "chunk survived: {text}");
    }

    #[test]
    fn segment_costs_cover_every_edit() {
        let plan = CorruptionPlan {
            edits: vec![
                Edit::Delete { pos: 0 },       // segment 0
                Edit::Insert { pos: 4, sym: 0 }, // now inside segment 1
                Edit::Insert { pos: 12, sym: 1 }, // append: last segment
                Edit::Delete { pos: 4 },       // deletes the inserted symbol
            ],
            budget: 4,
            strategy: "t".into(),
            seed: 0,
        };
        let costs = segment_edit_costs(&[3, 3, 3, 3], &plan).unwrap();
        assert_eq!(costs.iter().sum::<usize>(), 4);
        assert_eq!(costs, vec![1, 2, 0, 1]);
    }

    #[test]
    fn segment_costs_match_uniform_budgets() {
        let c = w("01010101010101010101", 2);
        for seed in 0..20 {
            let (_, plan) = corrupt(&c, 6, &Strategy::Uniform, seed).unwrap();
            let costs = segment_edit_costs(&[5, 5, 5, 5], &plan).unwrap();
            assert_eq!(costs.iter().sum::<usize>(), plan.edits.len());
        }
    }

    #[test]
    fn greedy_maximizes_the_probe_and_respects_budget() {
        let c = w("0101010101010101", 2);
        // Damage probe: number of ones (so greedy should insert ones /
        // delete zeros).
        let (out, plan) = corrupt_greedy(&c, 8, 42, |s| {
            s.syms().iter().filter(|&&x| x == 1).count() as f64
        })
        .unwrap();
        assert!(plan.edits.len() <= 8);
        assert!(verify_budget(&c, &out, 8).unwrap());
        let ones_before = c.syms().iter().filter(|&&x| x == 1).count();
        let ones_after = out.syms().iter().filter(|&&x| x == 1).count();
        assert!(ones_after > ones_before);
        // Replays exactly.
        assert_eq!(apply_plan(&c, &plan).unwrap(), out);
    }
}
