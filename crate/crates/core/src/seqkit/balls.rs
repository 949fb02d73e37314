//! Exhaustive decodability checks by error-ball enumeration.
//!
//! A code is decodable against an error model iff the balls of corrupted
//! strings around distinct codewords are pairwise disjoint. This module
//! materializes the balls and looks for a shared member. It exists as the
//! brute-force ground truth for the LCS-based radius formula, so it must
//! not take shortcuts through LCS itself.

use std::collections::{HashMap, HashSet};

use super::{validate_code, ErrorKind, ErrorModel, SymbolString};
use crate::error::{Error, Result};

/// Cap on generated ball members per call. Enumeration cost is
/// exponential in the budget; this converts a hang into an error.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// Whether every corrupted string under `model` identifies its codeword
/// uniquely. Enumerates the error balls; see [`DEFAULT_NODE_BUDGET`].
pub fn decodable_under(code: &[SymbolString], model: &ErrorModel) -> Result<bool> {
    decodable_under_with_budget(code, model, DEFAULT_NODE_BUDGET)
}

/// [`decodable_under`] with an explicit enumeration cap.
pub fn decodable_under_with_budget(
    code: &[SymbolString],
    model: &ErrorModel,
    node_budget: usize,
) -> Result<bool> {
    validate_code(code)?;
    let mut owner: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut nodes = 0usize;
    for (idx, word) in code.iter().enumerate() {
        let ball = enumerate_ball(word, model, node_budget, &mut nodes)?;
        for member in ball {
            if let Some(&prev) = owner.get(&member) {
                if prev != idx {
                    return Ok(false);
                }
            } else {
                owner.insert(member, idx);
            }
        }
    }
    Ok(true)
}

/// All strings reachable from `word` with at most `model.budget`
/// operations of the model's kind, deduplicated.
fn enumerate_ball(
    word: &SymbolString,
    model: &ErrorModel,
    node_budget: usize,
    nodes: &mut usize,
) -> Result<HashSet<Vec<u32>>> {
    let k = word.k();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(word.syms().to_vec());
    let mut frontier: Vec<Vec<u32>> = vec![word.syms().to_vec()];
    for _ in 0..model.budget {
        let mut next: Vec<Vec<u32>> = Vec::new();
        for s in &frontier {
            let mut push = |cand: Vec<u32>, nodes: &mut usize| -> Result<()> {
                *nodes += 1;
                if *nodes > node_budget {
                    return Err(Error::ResourceLimit(format!(
                        "ball enumeration exceeded {node_budget} nodes"
                    )));
                }
                if seen.insert(cand.clone()) {
                    next.push(cand);
                }
                Ok(())
            };
            let deletions = matches!(model.kind, ErrorKind::DeletionsOnly | ErrorKind::Mixed);
            let insertions = matches!(model.kind, ErrorKind::InsertionsOnly | ErrorKind::Mixed);
            if deletions {
                for i in 0..s.len() {
                    let mut c = s.clone();
                    c.remove(i);
                    push(c, nodes)?;
                }
            }
            if insertions {
                for i in 0..=s.len() {
                    for sym in 0..k {
                        let mut c = s.clone();
                        c.insert(i, sym);
                        push(c, nodes)?;
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen)
}
