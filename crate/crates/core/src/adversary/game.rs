use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};

/// An algorithm that answers every stream update with a response.
pub trait StreamingAlgorithm {
    type Update: Serialize;
    type Response: Serialize + Clone;

    fn seed(&self) -> u64;
    fn update(&mut self, update: &Self::Update) -> Result<Self::Response>;
}

/// A strategy choosing the next update from the responses seen so far.
pub trait AdversaryStrategy<U, R> {
    fn seed(&self) -> u64;
    fn next(&mut self, history: &[R]) -> Result<U>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub update_digest: String,
    pub response_digest: String,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub seed_algorithm: u64,
    pub seed_adversary: u64,
    pub horizon: usize,
    pub rounds: Vec<RoundRecord>,
    /// Error message of the party that stopped the game early.
    pub aborted: Option<String>,
}

impl GameTranscript {
    pub fn is_complete(&self) -> bool {
        self.aborted.is_none() && self.rounds.len() == self.horizon
    }

    /// Values of one metric in round order, skipping rounds without it.
    pub fn metric(&self, name: &str) -> Vec<(usize, f64)> {
        self.rounds
            .iter()
            .filter_map(|r| r.metrics.get(name).map(|&v| (r.round, v)))
            .collect()
    }
}

/// Result of a game: the transcript plus every response in order.
#[derive(Debug, Clone)]
pub struct GameOutcome<R> {
    pub transcript: GameTranscript,
    pub responses: Vec<R>,
}

/// SHA-256 of the JSON encoding, hex encoded.
pub fn digest<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).unwrap_or_default();
    let hash = Sha256::digest(&bytes);
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// Plays `horizon` rounds. The adversary producing update `t` sees exactly the
/// responses to updates `1..t`; the evaluator scores each round after the fact.
pub fn run_game<A, S, E>(
    alg: &mut A,
    adv: &mut S,
    horizon: usize,
    mut evaluate: E,
) -> Result<GameOutcome<A::Response>>
where
    A: StreamingAlgorithm,
    S: AdversaryStrategy<A::Update, A::Response>,
    E: FnMut(usize, &A::Update, &A::Response) -> BTreeMap<String, f64>,
{
    if horizon == 0 {
        return Err(invalid("horizon must be at least 1"));
    }
    let mut transcript = GameTranscript {
        seed_algorithm: alg.seed(),
        seed_adversary: adv.seed(),
        horizon,
        rounds: Vec::with_capacity(horizon),
        aborted: None,
    };
    let mut responses: Vec<A::Response> = Vec::with_capacity(horizon);
    for round in 1..=horizon {
        let update = match adv.next(&responses) {
            Ok(u) => u,
            Err(e) => {
                transcript.aborted = Some(format!("adversary at round {round}: {e}"));
                break;
            }
        };
        let response = match alg.update(&update) {
            Ok(r) => r,
            Err(e) => {
                transcript.aborted = Some(format!("algorithm at round {round}: {e}"));
                break;
            }
        };
        transcript.rounds.push(RoundRecord {
            round,
            update_digest: digest(&update),
            response_digest: digest(&response),
            metrics: evaluate(round, &update, &response),
        });
        responses.push(response);
    }
    Ok(GameOutcome {
        transcript,
        responses,
    })
}

/// Replays a fixed sequence of updates, ignoring every response.
#[derive(Debug, Clone)]
pub struct ScriptedAdversary<U> {
    script: Vec<U>,
    cursor: usize,
    seed: u64,
}

impl<U> ScriptedAdversary<U> {
    pub fn new(script: Vec<U>, seed: u64) -> Self {
        Self {
            script,
            cursor: 0,
            seed,
        }
    }
}

impl<U: Clone, R> AdversaryStrategy<U, R> for ScriptedAdversary<U> {
    fn seed(&self) -> u64 {
        self.seed
    }

    fn next(&mut self, _history: &[R]) -> Result<U> {
        let u = self
            .script
            .get(self.cursor)
            .cloned()
            .ok_or_else(|| invalid("script exhausted"))?;
        self.cursor += 1;
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Summer {
        total: i64,
    }

    impl StreamingAlgorithm for Summer {
        type Update = i64;
        type Response = i64;

        fn seed(&self) -> u64 {
            0
        }

        fn update(&mut self, u: &i64) -> Result<i64> {
            if *u < 0 {
                return Err(invalid("negative"));
            }
            self.total += u;
            Ok(self.total)
        }
    }

    struct Echo;

    impl AdversaryStrategy<i64, i64> for Echo {
        fn seed(&self) -> u64 {
            9
        }

        fn next(&mut self, history: &[i64]) -> Result<i64> {
            Ok(history.last().copied().unwrap_or(1))
        }
    }

    #[test]
    fn adversary_sees_previous_responses() {
        let out = run_game(&mut Summer { total: 0 }, &mut Echo, 5, |_, _, r| {
            BTreeMap::from([("total".to_string(), *r as f64)])
        })
        .unwrap();
        assert_eq!(out.responses, vec![1, 2, 4, 8, 16]);
        assert!(out.transcript.is_complete());
        assert_eq!(out.transcript.seed_adversary, 9);
        assert_eq!(out.transcript.metric("total")[4], (5, 16.0));
    }

    #[test]
    fn scripted_matches_oblivious_replay() {
        let script = vec![3, 1, 4, 1, 5];
        let mut adv = ScriptedAdversary::new(script.clone(), 0);
        let out = run_game(&mut Summer { total: 0 }, &mut adv, 5, |_, _, _| BTreeMap::new()).unwrap();
        let mut direct = Summer { total: 0 };
        let replay: Vec<i64> = script.iter().map(|u| direct.update(u).unwrap()).collect();
        assert_eq!(out.responses, replay);
        for (rec, u) in out.transcript.rounds.iter().zip(&script) {
            assert_eq!(rec.update_digest, digest(u));
        }
    }

    #[test]
    fn zero_horizon_rejected_and_errors_abort() {
        assert!(run_game(&mut Summer { total: 0 }, &mut Echo, 0, |_, _, _| BTreeMap::new()).is_err());
        let mut adv = ScriptedAdversary::new(vec![1, -1, 2], 0);
        let out = run_game(&mut Summer { total: 0 }, &mut adv, 3, |_, _, _| BTreeMap::new()).unwrap();
        assert_eq!(out.transcript.rounds.len(), 1);
        assert!(out.transcript.aborted.as_deref().unwrap().contains("round 2"));
        assert!(!out.transcript.is_complete());
    }

    #[test]
    fn digest_is_stable_hex() {
        let d = digest(&vec![1.0f64, 2.0]);
        assert_eq!(d.len(), 64);
        assert_eq!(d, digest(&vec![1.0f64, 2.0]));
        assert_ne!(d, digest(&vec![1.0f64, 2.5]));
    }
}
