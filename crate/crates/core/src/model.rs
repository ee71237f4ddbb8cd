//! Domain model: proposals, attributes, utility matrices, value functions,
//! game instances and the target's knowledge state.
//!
//! Everything in here is a plain value. The value computations are pure and
//! total over well-formed inputs.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{self, Scenario};

/// Every game has exactly three proposals.
pub const NUM_PROPOSALS: usize = 3;
/// Upper bound on attributes per proposal.
pub const MAX_ATTRIBUTES: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("effect value {0} is outside {{-1, 0, 1}}")]
    BadEffect(i64),
    #[error("weight value {0} is outside {{-1, 0, 1}}")]
    BadWeight(i64),
    #[error("index {0} out of range")]
    OutOfRange(usize),
    #[error("expected {expected} attributes, found {found}")]
    AttributeCount { expected: usize, found: usize },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no strict maximum among proposal utilities {0:?}")]
pub struct NonStrict(pub [i32; NUM_PROPOSALS]);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Proposal(u8);

impl Proposal {
    pub const ALL: [Proposal; NUM_PROPOSALS] = [Proposal(0), Proposal(1), Proposal(2)];

    pub fn new(index: usize) -> Result<Self, ModelError> {
        if index < NUM_PROPOSALS {
            Ok(Proposal(index as u8))
        } else {
            Err(ModelError::OutOfRange(index))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for Proposal {
    type Error = ModelError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Proposal::new(v as usize)
    }
}

impl From<Proposal> for u8 {
    fn from(p: Proposal) -> u8 {
        p.0
    }
}

impl fmt::Display for Proposal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", (b'A' + self.0) as char)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Attribute(u8);

impl Attribute {
    pub const ALL: [Attribute; MAX_ATTRIBUTES] = [Attribute(0), Attribute(1), Attribute(2)];

    pub fn new(index: usize) -> Result<Self, ModelError> {
        if index < MAX_ATTRIBUTES {
            Ok(Attribute(index as u8))
        } else {
            Err(ModelError::OutOfRange(index))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The first `n` attributes.
    pub fn first(n: usize) -> impl Iterator<Item = Attribute> {
        Attribute::ALL.into_iter().take(n)
    }
}

impl TryFrom<u8> for Attribute {
    type Error = ModelError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Attribute::new(v as usize)
    }
}

impl From<Attribute> for u8 {
    fn from(a: Attribute) -> u8 {
        a.0
    }
}

/// Effect of a proposal on an attribute.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Effect {
    Decrease,
    #[default]
    NoEffect,
    Increase,
}

impl Effect {
    pub const ALL: [Effect; 3] = [Effect::Decrease, Effect::NoEffect, Effect::Increase];

    pub fn value(self) -> i32 {
        match self {
            Effect::Decrease => -1,
            Effect::NoEffect => 0,
            Effect::Increase => 1,
        }
    }

    pub fn from_value(v: i64) -> Result<Self, ModelError> {
        match v {
            -1 => Ok(Effect::Decrease),
            0 => Ok(Effect::NoEffect),
            1 => Ok(Effect::Increase),
            other => Err(ModelError::BadEffect(other)),
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Effect::Decrease => Effect::Increase,
            Effect::NoEffect => Effect::NoEffect,
            Effect::Increase => Effect::Decrease,
        }
    }

    /// Verb phrase as used in "Proposal A will ___ development speed".
    pub fn verb_phrase(self) -> &'static str {
        match self {
            Effect::Decrease => "decrease",
            Effect::NoEffect => "have no effect on",
            Effect::Increase => "increase",
        }
    }
}

impl TryFrom<i8> for Effect {
    type Error = ModelError;
    fn try_from(v: i8) -> Result<Self, Self::Error> {
        Effect::from_value(v as i64)
    }
}

impl From<Effect> for i8 {
    fn from(e: Effect) -> i8 {
        e.value() as i8
    }
}

/// One entry of the utility matrix.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Cell {
    pub proposal: Proposal,
    pub attribute: Attribute,
}

impl Cell {
    pub fn new(proposal: Proposal, attribute: Attribute) -> Self {
        Cell { proposal, attribute }
    }

    /// Convenience constructor from raw indices; panics on out-of-range input.
    pub const fn at(proposal: usize, attribute: usize) -> Self {
        assert!(proposal < NUM_PROPOSALS && attribute < MAX_ATTRIBUTES, "cell index out of range");
        Cell { proposal: Proposal(proposal as u8), attribute: Attribute(attribute as u8) }
    }

    pub(crate) fn bit(self) -> u16 {
        1 << (self.proposal.index() * MAX_ATTRIBUTES + self.attribute.index())
    }

    fn from_bit_index(i: usize) -> Self {
        Cell::at(i / MAX_ATTRIBUTES, i % MAX_ATTRIBUTES)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.proposal, self.attribute.index())
    }
}

/// A set of cells, stored as a bitmask. Iteration order is proposal-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CellSet(u16);

impl CellSet {
    pub const EMPTY: CellSet = CellSet(0);

    pub fn from_bits(bits: u16) -> Self {
        CellSet(bits & 0x1ff)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    /// All cells of a matrix with `num_attributes` attributes.
    pub fn all(num_attributes: usize) -> Self {
        let mut s = CellSet::EMPTY;
        for p in Proposal::ALL {
            for a in Attribute::first(num_attributes) {
                s.insert(Cell::new(p, a));
            }
        }
        s
    }

    pub fn of_proposal(proposal: Proposal, num_attributes: usize) -> Self {
        Attribute::first(num_attributes).map(|a| Cell::new(proposal, a)).collect()
    }

    pub fn contains(self, cell: Cell) -> bool {
        self.0 & cell.bit() != 0
    }

    pub fn insert(&mut self, cell: Cell) {
        self.0 |= cell.bit();
    }

    pub fn remove(&mut self, cell: Cell) {
        self.0 &= !cell.bit();
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: CellSet) -> CellSet {
        CellSet(self.0 | other.0)
    }

    pub fn intersection(self, other: CellSet) -> CellSet {
        CellSet(self.0 & other.0)
    }

    pub fn difference(self, other: CellSet) -> CellSet {
        CellSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: CellSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Cell> {
        (0..NUM_PROPOSALS * MAX_ATTRIBUTES)
            .filter(move |i| self.0 & (1 << i) != 0)
            .map(Cell::from_bit_index)
    }

    /// Every subset of `self`, ascending by bitmask.
    pub fn subsets(self) -> impl Iterator<Item = CellSet> {
        let full = self.0;
        let mut next = Some(0u16);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(CellSet(cur))
        })
    }

    /// Sorted cell list, the key used for lexicographic ordering of sets.
    pub fn sorted_cells(self) -> Vec<Cell> {
        self.iter().collect()
    }
}

impl FromIterator<Cell> for CellSet {
    fn from_iter<I: IntoIterator<Item = Cell>>(iter: I) -> Self {
        let mut s = CellSet::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|c| c.to_string())).finish()
    }
}

impl Serialize for CellSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for CellSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let cells = Vec::<Cell>::deserialize(d)?;
        Ok(cells.into_iter().collect())
    }
}

/// Effects of each proposal on each attribute.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct UtilityMatrix {
    num_attributes: usize,
    effects: [[Effect; MAX_ATTRIBUTES]; NUM_PROPOSALS],
}

impl UtilityMatrix {
    pub fn new(rows: [[Effect; MAX_ATTRIBUTES]; NUM_PROPOSALS]) -> Self {
        UtilityMatrix { num_attributes: MAX_ATTRIBUTES, effects: rows }
    }

    /// Build from integer rows; every row must have the same length (2 or 3).
    pub fn from_values(rows: &[Vec<i64>]) -> Result<Self, ModelError> {
        if rows.len() != NUM_PROPOSALS {
            return Err(ModelError::InvalidInstance(format!(
                "matrix needs {NUM_PROPOSALS} rows, found {}",
                rows.len()
            )));
        }
        let n = rows[0].len();
        if !(2..=MAX_ATTRIBUTES).contains(&n) {
            return Err(ModelError::AttributeCount { expected: MAX_ATTRIBUTES, found: n });
        }
        let mut effects = [[Effect::NoEffect; MAX_ATTRIBUTES]; NUM_PROPOSALS];
        for (p, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::AttributeCount { expected: n, found: row.len() });
            }
            for (a, &v) in row.iter().enumerate() {
                effects[p][a] = Effect::from_value(v)?;
            }
        }
        Ok(UtilityMatrix { num_attributes: n, effects })
    }

    /// Matrix for `num_attributes` attributes decoded from a base-3 code
    /// (digit 0 = decrease, 1 = no effect, 2 = increase), proposal-major.
    pub fn from_code(code: u32, num_attributes: usize) -> Self {
        let mut effects = [[Effect::NoEffect; MAX_ATTRIBUTES]; NUM_PROPOSALS];
        let mut c = code;
        for row in effects.iter_mut() {
            for e in row.iter_mut().take(num_attributes) {
                *e = Effect::ALL[(c % 3) as usize];
                c /= 3;
            }
        }
        UtilityMatrix { num_attributes, effects }
    }

    pub fn num_attributes(&self) -> usize {
        self.num_attributes
    }

    pub fn get(&self, cell: Cell) -> Effect {
        self.effects[cell.proposal.index()][cell.attribute.index()]
    }

    pub fn set(&mut self, cell: Cell, effect: Effect) {
        self.effects[cell.proposal.index()][cell.attribute.index()] = effect;
    }

    pub fn all_cells(&self) -> CellSet {
        CellSet::all(self.num_attributes)
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        self.effects
            .iter()
            .map(|row| row[..self.num_attributes].iter().map(|&e| e.into()).collect())
            .collect()
    }
}

impl Serialize for UtilityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for UtilityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        UtilityMatrix::from_values(&rows).map_err(serde::de::Error::custom)
    }
}

/// The target's like (+1) / indifferent (0) / dislike (-1) weight per attribute.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ValueFunction {
    num_attributes: usize,
    weights: [i8; MAX_ATTRIBUTES],
}

impl ValueFunction {
    pub fn new(weights: &[i64]) -> Result<Self, ModelError> {
        if !(1..=MAX_ATTRIBUTES).contains(&weights.len()) {
            return Err(ModelError::AttributeCount { expected: MAX_ATTRIBUTES, found: weights.len() });
        }
        let mut w = [0i8; MAX_ATTRIBUTES];
        for (slot, &v) in w.iter_mut().zip(weights) {
            if !(-1..=1).contains(&v) {
                return Err(ModelError::BadWeight(v));
            }
            *slot = v as i8;
        }
        Ok(ValueFunction { num_attributes: weights.len(), weights: w })
    }

    /// Decode from a base-3 code (digit 0 = -1, 1 = 0, 2 = +1).
    pub fn from_code(code: u32, num_attributes: usize) -> Self {
        let mut weights = [0i8; MAX_ATTRIBUTES];
        let mut c = code;
        for w in weights.iter_mut().take(num_attributes) {
            *w = (c % 3) as i8 - 1;
            c /= 3;
        }
        ValueFunction { num_attributes, weights }
    }

    pub fn num_attributes(&self) -> usize {
        self.num_attributes
    }

    pub fn weight(&self, attribute: Attribute) -> i32 {
        self.weights[attribute.index()] as i32
    }

    pub fn weights(&self) -> Vec<i8> {
        self.weights[..self.num_attributes].to_vec()
    }

    pub fn negated(&self) -> Self {
        let mut out = *self;
        for w in out.weights.iter_mut() {
            *w = -*w;
        }
        out
    }
}

impl Serialize for ValueFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.weights().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValueFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Vec::<i64>::deserialize(d)?;
        ValueFunction::new(&w).map_err(serde::de::Error::custom)
    }
}

/// Per-proposal utility of the target given the cells it knows about.
/// Unknown cells contribute nothing.
pub fn evaluate_utilities(
    matrix: &UtilityMatrix,
    values: &ValueFunction,
    known: CellSet,
) -> [i32; NUM_PROPOSALS] {
    let mut out = [0i32; NUM_PROPOSALS];
    for cell in known.intersection(matrix.all_cells()).iter() {
        out[cell.proposal.index()] += values.weight(cell.attribute) * matrix.get(cell).value();
    }
    out
}

/// All proposals attaining the maximum utility, ascending by index.
pub fn argmax_set(utilities: &[i32; NUM_PROPOSALS]) -> Vec<Proposal> {
    let best = *utilities.iter().max().expect("three proposals");
    Proposal::ALL.into_iter().filter(|p| utilities[p.index()] == best).collect()
}

/// The unique maximiser, if there is one.
pub fn strict_argmax(utilities: &[i32; NUM_PROPOSALS]) -> Option<Proposal> {
    match argmax_set(utilities).as_slice() {
        [only] => Some(*only),
        _ => None,
    }
}

/// Derived labels of a configuration: the initial choice (with hidden cells
/// unknown) and the full-information choice.
pub fn canonical_labels(
    matrix: &UtilityMatrix,
    values: &ValueFunction,
    hidden: CellSet,
) -> Result<(Proposal, Proposal), NonStrict> {
    let all = matrix.all_cells();
    let start = evaluate_utilities(matrix, values, all.difference(hidden));
    let z = strict_argmax(&start).ok_or(NonStrict(start))?;
    let full = evaluate_utilities(matrix, values, all);
    let y = strict_argmax(&full).ok_or(NonStrict(full))?;
    Ok((z, y))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Hidden,
    Revealed,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Hidden => "hidden",
            Condition::Revealed => "revealed",
        })
    }
}

impl std::str::FromStr for Condition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hidden" => Ok(Condition::Hidden),
            "revealed" => Ok(Condition::Revealed),
            other => Err(format!("unknown condition `{other}`")),
        }
    }
}

/// One game's ground truth.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Instance {
    pub id: String,
    pub scenario: String,
    pub matrix: UtilityMatrix,
    pub values: ValueFunction,
    pub hidden: CellSet,
    pub reveal: CellSet,
    pub goal: Proposal,
    pub initial_choice: Proposal,
    pub full_info_choice: Proposal,
}

#[derive(Deserialize)]
struct RawInstance {
    id: String,
    scenario: String,
    matrix: UtilityMatrix,
    values: ValueFunction,
    hidden: CellSet,
    reveal: CellSet,
    goal: Proposal,
    initial_choice: Proposal,
    full_info_choice: Proposal,
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawInstance::deserialize(d)?;
        let inst = Instance::new(&raw.scenario, raw.matrix, raw.values, raw.hidden, raw.reveal)
            .map_err(serde::de::Error::custom)?;
        if inst.goal != raw.goal
            || inst.initial_choice != raw.initial_choice
            || inst.full_info_choice != raw.full_info_choice
        {
            return Err(serde::de::Error::custom("stored labels disagree with the matrix"));
        }
        Ok(Instance { id: raw.id, ..inst })
    }
}

impl Instance {
    /// Build an instance, deriving the goal and both labels and checking every
    /// structural condition.
    pub fn new(
        scenario_id: &str,
        matrix: UtilityMatrix,
        values: ValueFunction,
        hidden: CellSet,
        reveal: CellSet,
    ) -> Result<Self, ModelError> {
        let scenario = scenario::get(scenario_id)
            .ok_or_else(|| ModelError::UnknownScenario(scenario_id.to_string()))?;
        if matrix.num_attributes() != scenario.attribute_names.len()
            || values.num_attributes() != matrix.num_attributes()
        {
            return Err(ModelError::AttributeCount {
                expected: scenario.attribute_names.len(),
                found: matrix.num_attributes(),
            });
        }
        let labels = crate::generator::derive_labels(&values, &matrix, hidden, reveal)
            .ok_or_else(|| ModelError::InvalidInstance("derived-choice conditions fail".into()))?;
        Ok(Instance {
            id: instance_id(&values, &matrix, hidden, reveal),
            scenario: scenario_id.to_string(),
            matrix,
            values,
            hidden,
            reveal,
            goal: labels.goal,
            initial_choice: labels.initial_choice,
            full_info_choice: labels.full_info_choice,
        })
    }

    pub fn scenario(&self) -> &'static Scenario {
        scenario::get(&self.scenario).expect("instance scenario validated at construction")
    }

    pub fn num_attributes(&self) -> usize {
        self.matrix.num_attributes()
    }

    pub fn all_cells(&self) -> CellSet {
        self.matrix.all_cells()
    }

    /// Cells the target knows before any disclosure.
    pub fn initially_known(&self) -> CellSet {
        self.all_cells().difference(self.hidden)
    }

    pub fn utilities(&self, known: CellSet) -> [i32; NUM_PROPOSALS] {
        evaluate_utilities(&self.matrix, &self.values, known)
    }

    /// Same instance moved onto another scenario with the same attribute count.
    pub fn with_scenario(&self, scenario_id: &str) -> Result<Self, ModelError> {
        let mut out = Instance::new(scenario_id, self.matrix, self.values, self.hidden, self.reveal)?;
        out.id = self.id.clone();
        Ok(out)
    }
}

/// Stable identifier derived from the configuration.
pub fn instance_id(values: &ValueFunction, matrix: &UtilityMatrix, hidden: CellSet, reveal: CellSet) -> String {
    let digit = |v: i32| match v {
        -1 => '-',
        0 => '0',
        _ => '+',
    };
    let v: String = values.weights().iter().map(|&w| digit(w as i32)).collect();
    let m: String = matrix
        .rows()
        .iter()
        .map(|row| row.iter().map(|&e| digit(e as i32)).collect::<String>())
        .collect::<Vec<_>>()
        .join(".");
    format!("v{v}_m{m}_h{:03x}_r{:03x}", hidden.bits(), reveal.bits())
}

/// What the target knows and which proposal it currently holds.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KnowledgeState {
    pub known: CellSet,
    pub incumbency: Vec<Proposal>,
    pub current_choice: Proposal,
}

impl KnowledgeState {
    /// Start-of-game state: everything but the hidden cells is known and the
    /// incumbent is the initial choice.
    pub fn initial(instance: &Instance) -> Self {
        KnowledgeState {
            known: instance.initially_known(),
            incumbency: vec![instance.initial_choice],
            current_choice: instance.initial_choice,
        }
    }

    /// A state holding `choice` with no other incumbency history.
    pub fn with_choice(known: CellSet, choice: Proposal) -> Self {
        KnowledgeState { known, incumbency: vec![choice], current_choice: choice }
    }

    /// Re-choose given fresh utilities. The incumbent is kept whenever it is
    /// among the maximisers; otherwise the maximiser that was incumbent
    /// earliest wins, and failing that the lowest-index maximiser.
    pub fn update_choice(&self, utilities: &[i32; NUM_PROPOSALS]) -> KnowledgeState {
        let mut next = self.clone();
        next.update_choice_in_place(utilities);
        next
    }

    pub fn update_choice_in_place(&mut self, utilities: &[i32; NUM_PROPOSALS]) {
        let best = argmax_set(utilities);
        if best.contains(&self.current_choice) {
            return;
        }
        let chosen = self
            .incumbency
            .iter()
            .copied()
            .find(|p| best.contains(p))
            .unwrap_or(best[0]);
        self.current_choice = chosen;
        self.incumbency.push(chosen);
    }
}
