//! Enumeration and sampling of valid game configurations.
//!
//! A configuration is valid when the target's full-information choice `y`,
//! its start-of-game choice `z` and its choice after exactly the reveal set
//! `x` are all strict maximisers and pairwise distinct, the hidden set has at
//! most four cells and the reveal set is a subset of the hidden set.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    evaluate_utilities, instance_id, strict_argmax, CellSet, Instance, KnowledgeState, ModelError,
    Proposal, UtilityMatrix, ValueFunction, MAX_ATTRIBUTES, NUM_PROPOSALS,
};
use crate::scenario;
use crate::target::disclose_cells;

pub const MAX_HIDDEN: usize = 4;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("only {available} instances pass the filters, {requested} requested")]
    InsufficientInstances { available: usize, requested: usize },
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub num_attributes: usize,
    pub require_hidden_exact_4: bool,
    pub require_reveal_exact_2: bool,
    pub filter_trivial_strategies: bool,
    /// Keep only instances where each reveal cell is necessary and each other
    /// hidden cell spoils the reveal set when added to it.
    pub require_necessary_and_poison: bool,
    pub seed: u64,
    pub sample_count: usize,
    /// Scenario for every sampled instance; `None` cycles through the mental
    /// cover stories.
    pub scenario: Option<String>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            num_attributes: 3,
            require_hidden_exact_4: true,
            require_reveal_exact_2: true,
            filter_trivial_strategies: true,
            require_necessary_and_poison: true,
            seed: 0,
            sample_count: 100,
            scenario: None,
        }
    }
}

impl GeneratorParams {
    fn validate(&self) -> Result<(), GenError> {
        if !(2..=MAX_ATTRIBUTES).contains(&self.num_attributes) {
            return Err(GenError::BadParams(format!(
                "num_attributes must be 2 or 3, got {}",
                self.num_attributes
            )));
        }
        Ok(())
    }
}

/// Goal and the two derived labels of a configuration.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Labels {
    pub goal: Proposal,
    pub initial_choice: Proposal,
    pub full_info_choice: Proposal,
}

/// A valid configuration without a cover story attached.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Configuration {
    pub values: ValueFunction,
    pub matrix: UtilityMatrix,
    pub hidden: CellSet,
    pub reveal: CellSet,
    pub labels: Labels,
}

impl Configuration {
    pub fn into_instance(self, scenario_id: &str) -> Result<Instance, ModelError> {
        let sc = scenario::get(scenario_id).ok_or_else(|| ModelError::UnknownScenario(scenario_id.into()))?;
        if sc.attribute_names.len() != self.matrix.num_attributes() {
            return Err(ModelError::AttributeCount {
                expected: sc.attribute_names.len(),
                found: self.matrix.num_attributes(),
            });
        }
        Ok(Instance {
            id: instance_id(&self.values, &self.matrix, self.hidden, self.reveal),
            scenario: scenario_id.to_string(),
            matrix: self.matrix,
            values: self.values,
            hidden: self.hidden,
            reveal: self.reveal,
            goal: self.labels.goal,
            initial_choice: self.labels.initial_choice,
            full_info_choice: self.labels.full_info_choice,
        })
    }

    fn initial_state(&self) -> KnowledgeState {
        KnowledgeState::with_choice(self.matrix.all_cells().difference(self.hidden), self.labels.initial_choice)
    }
}

/// Goal and labels when all five conditions hold.
pub fn derive_labels(
    values: &ValueFunction,
    matrix: &UtilityMatrix,
    hidden: CellSet,
    reveal: CellSet,
) -> Option<Labels> {
    let all = matrix.all_cells();
    if !hidden.is_subset(all) || hidden.len() > MAX_HIDDEN || !reveal.is_subset(hidden) {
        return None;
    }
    let y = strict_argmax(&evaluate_utilities(matrix, values, all))?;
    let start = all.difference(hidden);
    let z = strict_argmax(&evaluate_utilities(matrix, values, start))?;
    let x = strict_argmax(&evaluate_utilities(matrix, values, start.union(reveal)))?;
    (x != y && y != z && x != z).then_some(Labels { goal: x, initial_choice: z, full_info_choice: y })
}

pub fn check_conditions(values: &ValueFunction, matrix: &UtilityMatrix, hidden: CellSet, reveal: CellSet) -> bool {
    derive_labels(values, matrix, hidden, reveal).is_some()
}

/// Subsets of the hidden set whose disclosure in one turn leaves the target
/// choosing the goal. Sorted by size, then lexicographically by cells.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WinningSets {
    pub subsets: Vec<CellSet>,
}

impl WinningSets {
    pub fn contains(&self, set: CellSet) -> bool {
        self.subsets.contains(&set)
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }
}

pub(crate) fn sort_sets(sets: &mut [CellSet]) {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.sorted_cells().cmp(&b.sorted_cells())));
}

fn winning_sets_of(values: &ValueFunction, matrix: &UtilityMatrix, start: &KnowledgeState, hidden: CellSet, goal: Proposal) -> WinningSets {
    let mut subsets: Vec<CellSet> = hidden
        .subsets()
        .filter(|&s| disclose_cells(start, matrix, values, s).current_choice == goal)
        .collect();
    sort_sets(&mut subsets);
    WinningSets { subsets }
}

pub fn winning_sets(instance: &Instance) -> WinningSets {
    winning_sets_of(
        &instance.values,
        &instance.matrix,
        &KnowledgeState::initial(instance),
        instance.hidden,
        instance.goal,
    )
}

fn configuration_winning_sets(c: &Configuration) -> WinningSets {
    winning_sets_of(&c.values, &c.matrix, &c.initial_state(), c.hidden, c.labels.goal)
}

fn num_matrices(num_attributes: usize) -> u32 {
    3u32.pow((NUM_PROPOSALS * num_attributes) as u32)
}

/// Visit every valid configuration of one (values, matrix) pair, in
/// ascending hidden-mask then reveal-mask order.
fn for_each_in_pair(values: &ValueFunction, matrix: &UtilityMatrix, mut f: impl FnMut(Configuration)) {
    let all = matrix.all_cells();
    // Condition 1 depends only on the pair.
    let Some(y) = strict_argmax(&evaluate_utilities(matrix, values, all)) else {
        return;
    };
    for hidden in all.subsets() {
        if hidden.len() > MAX_HIDDEN {
            continue;
        }
        let start = all.difference(hidden);
        let Some(z) = strict_argmax(&evaluate_utilities(matrix, values, start)) else {
            continue;
        };
        if z == y {
            continue;
        }
        for reveal in hidden.subsets() {
            let Some(x) = strict_argmax(&evaluate_utilities(matrix, values, start.union(reveal))) else {
                continue;
            };
            if x != y && x != z {
                f(Configuration {
                    values: *values,
                    matrix: *matrix,
                    hidden,
                    reveal,
                    labels: Labels { goal: x, initial_choice: z, full_info_choice: y },
                });
            }
        }
    }
}

fn pair_space(num_attributes: usize) -> impl IndexedParallelIterator<Item = (ValueFunction, UtilityMatrix)> {
    let nm = num_matrices(num_attributes);
    let nv = 3u32.pow(num_attributes as u32);
    (0..nv * nm).into_par_iter().map(move |code| {
        (
            ValueFunction::from_code(code / nm, num_attributes),
            UtilityMatrix::from_code(code % nm, num_attributes),
        )
    })
}

/// Every valid configuration, in deterministic order regardless of the
/// number of worker threads.
pub fn enumerate_configurations(num_attributes: usize) -> Vec<Configuration> {
    enumerate_filtered(num_attributes, |_| true)
}

/// Valid configurations passing `keep`, in enumeration order.
pub fn enumerate_filtered<F>(num_attributes: usize, keep: F) -> Vec<Configuration>
where
    F: Fn(&Configuration) -> bool + Sync,
{
    pair_space(num_attributes)
        .flat_map_iter(|(v, m)| {
            let mut out = Vec::new();
            for_each_in_pair(&v, &m, |c| {
                if keep(&c) {
                    out.push(c)
                }
            });
            out
        })
        .collect()
}

/// Enumerate instances. The cover story defaults to the first scenario with
/// the right attribute count.
pub fn enumerate_instances(params: &GeneratorParams) -> Result<Vec<Instance>, GenError> {
    params.validate()?;
    let scenario_id = match &params.scenario {
        Some(id) => id.clone(),
        None => default_scenario(params.num_attributes)?.to_string(),
    };
    enumerate_configurations(params.num_attributes)
        .into_iter()
        .map(|c| c.into_instance(&scenario_id).map_err(GenError::from))
        .collect()
}

fn default_scenario(num_attributes: usize) -> Result<&'static str, GenError> {
    scenario::SCENARIOS
        .iter()
        .find(|s| s.attribute_names.len() == num_attributes)
        .map(|s| s.id)
        .ok_or_else(|| GenError::BadParams(format!("no scenario with {num_attributes} attributes")))
}

/// Whether the reveal cells are each necessary and the remaining hidden
/// cells each spoil the reveal set.
pub fn has_necessary_and_poison_structure(instance: &Instance) -> bool {
    let start = KnowledgeState::initial(instance);
    structure_holds(&instance.values, &instance.matrix, &start, instance.hidden, instance.reveal, instance.goal)
}

fn structure_holds(
    values: &ValueFunction,
    matrix: &UtilityMatrix,
    start: &KnowledgeState,
    hidden: CellSet,
    reveal: CellSet,
    goal: Proposal,
) -> bool {
    let wins = |s: CellSet| disclose_cells(start, matrix, values, s).current_choice == goal;
    let necessary = reveal.iter().all(|c| {
        let mut s = reveal;
        s.remove(c);
        !wins(s)
    });
    let poison = hidden.difference(reveal).iter().all(|c| {
        let mut s = reveal;
        s.insert(c);
        !wins(s)
    });
    necessary && poison
}

fn passes_critical_filters(params: &GeneratorParams, c: &Configuration) -> bool {
    if params.require_hidden_exact_4 && c.hidden.len() != 4 {
        return false;
    }
    if params.require_reveal_exact_2 && c.reveal.len() != 2 {
        return false;
    }
    if params.filter_trivial_strategies {
        let wins = configuration_winning_sets(c);
        if wins.is_empty() {
            return false;
        }
        let goal_cells = CellSet::of_proposal(c.labels.goal, c.matrix.num_attributes());
        if wins.subsets.iter().any(|s| s.is_subset(goal_cells)) {
            return false;
        }
    }
    if params.require_necessary_and_poison
        && !structure_holds(&c.values, &c.matrix, &c.initial_state(), c.hidden, c.reveal, c.labels.goal)
    {
        return false;
    }
    true
}

/// All configurations passing the critical-trial filters of `params`.
pub fn critical_pool(params: &GeneratorParams) -> Result<Vec<Configuration>, GenError> {
    params.validate()?;
    Ok(enumerate_filtered(params.num_attributes, |c| passes_critical_filters(params, c)))
}

/// Seeded uniform sample without replacement from the critical pool.
pub fn sample_critical(params: &GeneratorParams) -> Result<Vec<Instance>, GenError> {
    let pool = critical_pool(params)?;
    sample_from_pool(&pool, params)
}

pub fn sample_from_pool(pool: &[Configuration], params: &GeneratorParams) -> Result<Vec<Instance>, GenError> {
    if pool.len() < params.sample_count {
        return Err(GenError::InsufficientInstances { available: pool.len(), requested: params.sample_count });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let picks = rand::seq::index::sample(&mut rng, pool.len(), params.sample_count);
    let mental: Vec<&str> = if params.num_attributes == 3 {
        scenario::mental().map(|s| s.id).collect()
    } else {
        vec![default_scenario(params.num_attributes)?]
    };
    picks
        .iter()
        .enumerate()
        .map(|(i, idx)| {
            let sc = params.scenario.as_deref().unwrap_or(mental[i % mental.len()]);
            pool[idx].into_instance(sc).map_err(GenError::from)
        })
        .collect()
}

/// Counts of valid configurations under the candidate counting conventions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationCounts {
    pub num_attributes: usize,
    /// Distinct (values, matrix, hidden) admitting at least one reveal set.
    pub with_some_reveal: usize,
    /// Distinct (values, matrix, hidden, reveal) tuples.
    pub tuples: usize,
    /// Distinct (values, hidden) pairs.
    pub value_hidden_pairs: usize,
    /// Distinct (hidden, reveal) pairs.
    pub hidden_reveal_pairs: usize,
    /// Tuples up to relabeling of proposals.
    pub tuples_up_to_proposal_relabeling: usize,
    /// Tuples up to relabeling of proposals and attributes.
    pub tuples_up_to_full_relabeling: usize,
}

impl ConfigurationCounts {
    /// Every reported count with its convention name.
    pub fn conventions(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("values-matrix-hidden", self.with_some_reveal),
            ("values-matrix-hidden-reveal", self.tuples),
            ("values-hidden", self.value_hidden_pairs),
            ("hidden-reveal", self.hidden_reveal_pairs),
            ("tuples-mod-proposal-relabeling", self.tuples_up_to_proposal_relabeling),
            ("tuples-mod-full-relabeling", self.tuples_up_to_full_relabeling),
        ]
    }
}

fn permutations3() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

fn attribute_permutations(n: usize) -> Vec<[usize; 3]> {
    if n == 3 {
        permutations3()
    } else {
        vec![[0, 1, 2], [1, 0, 2]]
    }
}

/// Relabel a configuration: new proposal `i` is old `pp[i]`, new attribute
/// `j` is old `ap[j]`.
pub fn relabel(c: &Configuration, pp: [usize; 3], ap: [usize; 3]) -> (ValueFunction, UtilityMatrix, CellSet, CellSet) {
    use crate::model::{Attribute, Cell};
    let n = c.matrix.num_attributes();
    let w = c.values.weights();
    let nv: Vec<i64> = (0..n).map(|j| w[ap[j]] as i64).collect();
    let values = ValueFunction::new(&nv).expect("permuted weights stay in range");
    let mut matrix = c.matrix;
    for i in 0..NUM_PROPOSALS {
        for j in 0..n {
            matrix.set(Cell::at(i, j), c.matrix.get(Cell::at(pp[i], ap[j])));
        }
    }
    let mut inv_p = [0usize; 3];
    for (i, &old) in pp.iter().enumerate() {
        inv_p[old] = i;
    }
    let mut inv_a = [0usize; 3];
    for (j, &old) in ap.iter().enumerate().take(n) {
        inv_a[old] = j;
    }
    let map = |s: CellSet| -> CellSet {
        s.iter()
            .map(|cell| Cell::new(Proposal::ALL[inv_p[cell.proposal.index()]], Attribute::ALL[inv_a[cell.attribute.index()]]))
            .collect()
    };
    (values, matrix, map(c.hidden), map(c.reveal))
}

fn key(values: &ValueFunction, matrix: &UtilityMatrix, hidden: CellSet, reveal: CellSet) -> u64 {
    let mut vcode = 0u64;
    for &w in values.weights().iter().rev() {
        vcode = vcode * 3 + (w + 1) as u64;
    }
    let mut mcode = 0u64;
    for row in matrix.rows().iter().rev() {
        for &e in row.iter().rev() {
            mcode = mcode * 3 + (e + 1) as u64;
        }
    }
    (vcode << 50) | (mcode << 20) | ((hidden.bits() as u64) << 10) | reveal.bits() as u64
}

fn distinct<T: Ord + Send>(mut v: Vec<T>) -> usize {
    v.par_sort_unstable();
    v.dedup();
    v.len()
}

pub fn count_configurations(num_attributes: usize) -> Result<ConfigurationCounts, GenError> {
    if !(2..=MAX_ATTRIBUTES).contains(&num_attributes) {
        return Err(GenError::BadParams(format!("num_attributes must be 2 or 3, got {num_attributes}")));
    }
    let all = enumerate_configurations(num_attributes);
    let pp_all = permutations3();
    let ap_all = attribute_permutations(num_attributes);
    let canonical = |c: &Configuration, perms_a: &[[usize; 3]]| -> u64 {
        pp_all
            .iter()
            .flat_map(|&pp| perms_a.iter().map(move |&ap| (pp, ap)))
            .map(|(pp, ap)| {
                let (v, m, h, r) = relabel(c, pp, ap);
                key(&v, &m, h, r)
            })
            .min()
            .expect("non-empty permutation set")
    };
    let identity = [[0usize, 1, 2]];
    Ok(ConfigurationCounts {
        num_attributes,
        with_some_reveal: distinct(all.iter().map(|c| key(&c.values, &c.matrix, c.hidden, CellSet::EMPTY)).collect()),
        tuples: all.len(),
        value_hidden_pairs: distinct(all.iter().map(|c| (c.values.weights(), c.hidden)).collect()),
        hidden_reveal_pairs: distinct(all.iter().map(|c| (c.hidden, c.reveal)).collect()),
        tuples_up_to_proposal_relabeling: distinct(all.par_iter().map(|c| canonical(c, &identity)).collect()),
        tuples_up_to_full_relabeling: distinct(all.par_iter().map(|c| canonical(c, &ap_all)).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;
    use crate::model::Cell;

    #[test]
    fn worked_example_passes_all_conditions() {
        let inst = worked_example();
        let labels = derive_labels(&inst.values, &inst.matrix, inst.hidden, inst.reveal).unwrap();
        assert_eq!(labels.goal.to_string(), "A");
        assert_eq!(labels.initial_choice.to_string(), "C");
        assert_eq!(labels.full_info_choice.to_string(), "B");
    }

    #[test]
    fn all_zero_matrix_fails() {
        let inst = worked_example();
        let zero = UtilityMatrix::from_code(
            // every digit 1 = no effect
            (0..9).fold(0, |acc, _| acc * 3 + 1),
            3,
        );
        assert!(!check_conditions(&inst.values, &zero, inst.hidden, inst.reveal));
    }

    #[test]
    fn reveal_outside_hidden_fails() {
        let inst = worked_example();
        let mut reveal = inst.reveal;
        reveal.insert(Cell::at(0, 0));
        assert!(!check_conditions(&inst.values, &inst.matrix, inst.hidden, reveal));
    }

    #[test]
    fn too_many_hidden_fails() {
        let inst = worked_example();
        let mut hidden = inst.hidden;
        hidden.insert(Cell::at(2, 0));
        assert!(!check_conditions(&inst.values, &inst.matrix, hidden, inst.reveal));
    }

    #[test]
    fn worked_example_winning_sets() {
        let inst = worked_example();
        let wins = winning_sets(&inst);
        assert!(wins.contains(inst.reveal));
        assert!(!wins.contains(inst.hidden));
        let goal_cells = CellSet::of_proposal(inst.goal, 3);
        assert!(wins.subsets.iter().all(|s| !s.is_subset(goal_cells)));
        // Adding B.d to the reveal set ties A and B, which falls to A.
        assert!(!has_necessary_and_poison_structure(&inst));
    }

    #[test]
    fn winning_sets_sorted_by_size_then_cells() {
        let inst = worked_example();
        let wins = winning_sets(&inst);
        for pair in wins.subsets.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            assert!(a.len() < b.len() || (a.len() == b.len() && a.sorted_cells() < b.sorted_cells()));
        }
    }

    #[test]
    fn two_attribute_enumeration_matches_unpruned_brute_force() {
        // Unpruned oracle: every (values, matrix, hidden, reveal) checked
        // directly against the five conditions.
        let pruned = enumerate_configurations(2);
        let mut brute = 0usize;
        for vc in 0..9 {
            let v = ValueFunction::from_code(vc, 2);
            for mc in 0..729 {
                let m = UtilityMatrix::from_code(mc, 2);
                for bits in 0u16..512 {
                    let hidden = CellSet::from_bits(bits);
                    if !hidden.is_subset(m.all_cells()) {
                        continue;
                    }
                    for reveal in hidden.subsets() {
                        if check_conditions(&v, &m, hidden, reveal) {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(pruned.len(), brute);
        assert!(pruned.iter().all(|c| check_conditions(&c.values, &c.matrix, c.hidden, c.reveal)));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate_configurations(2);
        let b = enumerate_configurations(2);
        assert_eq!(a, b);
    }

    #[test]
    fn two_attribute_counts_regression() {
        let counts = count_configurations(2).unwrap();
        assert_eq!(counts.tuples, 288);
        assert_eq!(counts.with_some_reveal, 288);
        assert_eq!(counts.value_hidden_pairs, 48);
        assert_eq!(counts.hidden_reveal_pairs, 60);
        assert_eq!(counts.tuples_up_to_proposal_relabeling, 48);
        assert_eq!(counts.tuples_up_to_full_relabeling, 24);
    }

    #[test]
    fn zero_value_functions_never_valid() {
        let zero = ValueFunction::new(&[0, 0]).unwrap();
        assert!(enumerate_configurations(2).iter().all(|c| c.values != zero));
    }

    #[test]
    fn relabeling_preserves_validity() {
        let configs = enumerate_configurations(2);
        for c in configs.iter().step_by(7) {
            for pp in permutations3() {
                for ap in attribute_permutations(2) {
                    let (v, m, h, r) = relabel(c, pp, ap);
                    assert!(check_conditions(&v, &m, h, r));
                }
            }
        }
    }

    #[test]
    fn bad_params_rejected() {
        let p = GeneratorParams { num_attributes: 1, ..Default::default() };
        assert!(matches!(sample_critical(&p), Err(GenError::BadParams(_))));
        assert!(count_configurations(4).is_err());
    }

    #[test]
    fn insufficient_instances_reported() {
        let p = GeneratorParams { num_attributes: 2, sample_count: 10_000, ..Default::default() };
        assert!(matches!(sample_critical(&p), Err(GenError::InsufficientInstances { .. })));
    }
}
