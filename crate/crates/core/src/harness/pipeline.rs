use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::synth::{synthesize_dataset, LabelledSample};
use super::{ExperimentConfig, HarnessError, StageExt};
use crate::classify::{Classifier, ClassifierBelief, Dataset, NoveltyDetector, TrainConfig};
use crate::decision::{decision_accuracy, point_belief, DecisionModel, DecisionScore, Strategy};
use crate::faulttree::{truss_fault_tree, HealthState, N_CROSS_MEMBERS};
use crate::transition::{build_transition, calibrate_wmax, maintenance_matrix, Calibration, LoadGrid};
use crate::truss::TrussModel;

// independent random streams derived from the master seed
const STREAM_TRAIN: u64 = 1;
const STREAM_VALID: u64 = 2;
const STREAM_TEST_DAMAGED: u64 = 3;
const STREAM_TEST_UNDAMAGED: u64 = 4;
const STREAM_INIT: u64 = 5;

fn derived_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

/// A held-out sample with its classifier outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub sample: LabelledSample,
    pub belief: ClassifierBelief,
    /// Detector verdict: outside the confidence band.
    pub novel: bool,
    /// Localiser's most probable member bit, 1..=8.
    pub located: usize,
}

/// Everything built before decisions are made: structure, transition
/// models, trained classifier and the classified test set.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub config: ExperimentConfig,
    pub truss: TrussModel,
    pub w_max: f64,
    pub calibration: Option<Calibration>,
    pub decision: DecisionModel,
    pub classifier: Classifier,
    pub localiser_validation_accuracy: f64,
    pub training_iterations: usize,
    pub test: Vec<TestCase>,
}

/// Truss, load scale and decision model for `config`.
pub fn decision_stage(config: &ExperimentConfig) -> Result<(TrussModel, f64, Option<Calibration>, DecisionModel), HarnessError> {
    config.validate()?;
    let truss = config.truss.build().stage("truss")?;
    let (w_max, calibration) = match config.w_max {
        Some(w) => (w, None),
        None => {
            let c = calibrate_wmax(&truss, config.calibration_target).stage("calibrate")?;
            (c.w_max, Some(c))
        }
    };
    let do_nothing = build_transition(&truss, &LoadGrid::for_model(&truss, w_max)).stage("transition")?;
    let decision =
        DecisionModel::new(truss_fault_tree(), do_nothing, maintenance_matrix(), config.utilities).stage("transition")?;
    Ok((truss, w_max, calibration, decision))
}

fn damaged_states() -> Vec<HealthState> {
    (1..=N_CROSS_MEMBERS).map(HealthState::single).collect()
}

fn localiser_data(samples: &[LabelledSample]) -> Result<Dataset, HarnessError> {
    let damaged: Vec<&LabelledSample> = samples.iter().filter(|s| s.health.is_single_failure()).collect();
    let labels = damaged.iter().map(|s| s.health.failed_members()[0] - 8).collect();
    Dataset::new(damaged.iter().map(|s| s.strains.clone()).collect(), labels).stage("localiser")
}

impl Pipeline {
    pub fn build(config: &ExperimentConfig) -> Result<Self, HarnessError> {
        let (truss, w_max, calibration, decision) = decision_stage(config)?;
        let seed = config.seed;
        let mut all_states = vec![HealthState::UNDAMAGED];
        all_states.extend(damaged_states());

        let train = synthesize_dataset(
            &truss,
            &all_states,
            &config.train_loads,
            config.repetitions,
            config.noise_rms,
            derived_seed(seed, STREAM_TRAIN),
        )
        .stage("synthesize")?;
        let valid = synthesize_dataset(
            &truss,
            &damaged_states(),
            &config.validation_loads,
            config.validation_repetitions,
            config.noise_rms,
            derived_seed(seed, STREAM_VALID),
        )
        .stage("synthesize")?;
        let mut test = synthesize_dataset(
            &truss,
            &damaged_states(),
            &config.validation_loads,
            1,
            config.noise_rms,
            derived_seed(seed, STREAM_TEST_DAMAGED),
        )
        .stage("synthesize")?;
        test.extend(
            synthesize_dataset(
                &truss,
                &[HealthState::UNDAMAGED],
                &config.validation_loads,
                config.undamaged_test_repetitions,
                config.noise_rms,
                derived_seed(seed, STREAM_TEST_UNDAMAGED),
            )
            .stage("synthesize")?,
        );

        let undamaged: Vec<Vec<f64>> =
            train.iter().filter(|s| s.health == HealthState::UNDAMAGED).map(|s| s.strains.clone()).collect();
        let detector = NoveltyDetector::fit(&undamaged).stage("detector")?;

        let train_config = TrainConfig { seed: derived_seed(seed, STREAM_INIT), optimizer: config.optimizer };
        let report = train_config.fit(&localiser_data(&train)?, &localiser_data(&valid)?).stage("localiser")?;
        let classifier = Classifier { detector, localiser: report.network };

        let test = test
            .into_par_iter()
            .map(|sample| {
                let belief = classifier.belief(&sample.strains)?;
                let novel = classifier.detector.is_novel(&sample.strains)?;
                let located = classifier.localiser.predict(&sample.strains)?;
                Ok(TestCase { sample, belief, novel, located })
            })
            .collect::<Result<Vec<_>, crate::classify::ClassifyError>>()
            .stage("classify")?;

        Ok(Self {
            config: config.clone(),
            truss,
            w_max,
            calibration,
            decision,
            classifier,
            localiser_validation_accuracy: report.validation_accuracy,
            training_iterations: report.iterations,
            test,
        })
    }

    /// Optimal strategies for the test beliefs and for point beliefs on
    /// the true states, under `model`.
    pub fn decide(&self, model: &DecisionModel) -> Result<(Vec<Strategy>, Vec<Strategy>), HarnessError> {
        self.decide_with(model, |case| case.belief.as_slice().to_vec())
    }

    pub(crate) fn decide_with(
        &self,
        model: &DecisionModel,
        belief: impl Fn(&TestCase) -> Vec<f64> + Sync,
    ) -> Result<(Vec<Strategy>, Vec<Strategy>), HarnessError> {
        let pairs = self
            .test
            .par_iter()
            .map(|case| {
                let decided = model.optimal_strategy(&belief(case))?.strategy;
                let oracle = model.optimal_strategy(&point_belief(case.sample.health))?.strategy;
                Ok((decided, oracle))
            })
            .collect::<Result<Vec<_>, crate::decision::DecisionError>>()
            .stage("decide")?;
        Ok(pairs.into_iter().unzip())
    }
}

/// Counts and scores of one case-study run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub seed: u64,
    pub w_max: f64,
    pub calibration: Option<Calibration>,
    /// `[actual][predicted]` over (undamaged, damaged).
    pub detector_confusion: [[usize; 2]; 2],
    /// `[actual][predicted]` over member bits 1..=8, damaged test samples.
    pub localiser_confusion: [[usize; N_CROSS_MEMBERS]; N_CROSS_MEMBERS],
    pub localiser_validation_accuracy: f64,
    pub training_iterations: usize,
    pub decisions: DecisionScore,
    pub test: Vec<TestCase>,
    pub decided: Vec<Strategy>,
    pub oracle: Vec<Strategy>,
}

impl CaseStudyReport {
    pub fn from_pipeline(p: &Pipeline) -> Result<Self, HarnessError> {
        let mut detector_confusion = [[0; 2]; 2];
        let mut localiser_confusion = [[0; N_CROSS_MEMBERS]; N_CROSS_MEMBERS];
        for case in &p.test {
            let damaged = case.sample.health != HealthState::UNDAMAGED;
            detector_confusion[damaged as usize][case.novel as usize] += 1;
            if damaged {
                let actual = case.sample.health.failed_members()[0] - 8;
                localiser_confusion[actual - 1][case.located - 1] += 1;
            }
        }
        let (decided, oracle) = p.decide(&p.decision)?;
        let decisions = decision_accuracy(&decided, &oracle).stage("decide")?;
        Ok(Self {
            seed: p.config.seed,
            w_max: p.w_max,
            calibration: p.calibration.clone(),
            detector_confusion,
            localiser_confusion,
            localiser_validation_accuracy: p.localiser_validation_accuracy,
            training_iterations: p.training_iterations,
            decisions,
            test: p.test.clone(),
            decided,
            oracle,
        })
    }

    pub fn n_undamaged(&self) -> usize {
        self.detector_confusion[0].iter().sum()
    }

    pub fn n_damaged(&self) -> usize {
        self.detector_confusion[1].iter().sum()
    }

    pub fn detector_accuracy(&self) -> f64 {
        let c = &self.detector_confusion;
        (c[0][0] + c[1][1]) as f64 / (self.n_undamaged() + self.n_damaged()) as f64
    }

    pub fn localiser_accuracy(&self) -> f64 {
        let c = &self.localiser_confusion;
        (0..N_CROSS_MEMBERS).map(|i| c[i][i]).sum::<usize>() as f64 / self.n_damaged() as f64
    }
}

/// Builds the pipeline and scores the test-set decisions.
pub fn run_case_study(config: &ExperimentConfig) -> Result<CaseStudyReport, HarnessError> {
    CaseStudyReport::from_pipeline(&Pipeline::build(config)?)
}
