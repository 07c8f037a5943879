//! The navigation decision process.
//!
//! The vehicle is a particle in the tangent plane of a [`Region`]. It sees
//! only geomagnetic elements at its current position and at the
//! destination, plus its previous action; the true pose is kept for
//! bookkeeping and traces.

mod reward;
mod trace;

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use reward::{
    angular_distance, compute_reward, motion_update, objective, theoretical_heading, Heading,
    Objective, RewardBreakdown, DENOMINATOR_FLOOR, PARALLEL_EPS,
};
pub use trace::{EpisodeTrace, TraceRow, TRACE_CSV_HEADER};

use crate::field::{gradients, Element, FieldSource, GeomagneticElements, GradientVector};
use crate::geo::{GeoPosition, LocalFrame, Region};
use crate::{Error, Result};

pub const STATE_DIM: usize = 8;
pub const ACTION_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehiclePose {
    /// Metres east of the region anchor.
    pub x: f64,
    /// Metres north of the region anchor.
    pub y: f64,
    /// Accumulated heading, radians counter-clockwise from east.
    pub theta: f64,
    pub step_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavAction {
    /// Metres, `[0, L_max]`.
    pub distance: f64,
    /// Radians, `[-π/2, π/2]`.
    pub yaw: f64,
}

impl NavAction {
    /// Clamps into `[0, max_distance] × [-π/2, π/2]`.
    pub fn new(distance: f64, yaw: f64, max_distance: f64) -> Self {
        let distance = if distance.is_nan() { 0.0 } else { distance };
        let yaw = if yaw.is_nan() { 0.0 } else { yaw };
        Self {
            distance: distance.clamp(0.0, max_distance),
            yaw: yaw.clamp(-FRAC_PI_2, FRAC_PI_2),
        }
    }

    /// Unchecked constructor.
    pub fn raw(distance: f64, yaw: f64) -> Self {
        Self { distance, yaw }
    }

    /// Maps a `[-1, 1]²` vector onto the action box (clipping first).
    pub fn from_normalized(a: [f64; 2], max_distance: f64) -> Self {
        let u = a[0].clamp(-1.0, 1.0);
        let v = a[1].clamp(-1.0, 1.0);
        Self::new(0.5 * (u + 1.0) * max_distance, v * FRAC_PI_2, max_distance)
    }

    pub fn to_normalized(&self, max_distance: f64) -> [f64; 2] {
        [
            2.0 * self.distance / max_distance - 1.0,
            self.yaw / FRAC_PI_2,
        ]
    }
}

/// Observation: elements here and at the destination plus the last action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavState {
    pub d_cur: f64,
    pub i_cur: f64,
    pub bh_cur: f64,
    pub d_tgt: f64,
    pub i_tgt: f64,
    pub bh_tgt: f64,
    pub last_distance: f64,
    pub last_yaw: f64,
}

impl NavState {
    fn new(cur: &GeomagneticElements, tgt: &GeomagneticElements, last: NavAction) -> Self {
        Self {
            d_cur: cur.d,
            i_cur: cur.i,
            bh_cur: cur.b_h,
            d_tgt: tgt.d,
            i_tgt: tgt.i,
            bh_tgt: tgt.b_h,
            last_distance: last.distance,
            last_yaw: last.yaw,
        }
    }

    pub fn to_array(&self) -> [f64; STATE_DIM] {
        [
            self.d_cur,
            self.i_cur,
            self.bh_cur,
            self.d_tgt,
            self.i_tgt,
            self.bh_tgt,
            self.last_distance,
            self.last_yaw,
        ]
    }

    pub fn from_array(a: [f64; STATE_DIM]) -> Self {
        Self {
            d_cur: a[0],
            i_cur: a[1],
            bh_cur: a[2],
            d_tgt: a[3],
            i_tgt: a[4],
            bh_tgt: a[5],
            last_distance: a[6],
            last_yaw: a[7],
        }
    }

    pub fn current(&self) -> [f64; 3] {
        [self.d_cur, self.i_cur, self.bh_cur]
    }

    pub fn target(&self) -> [f64; 3] {
        [self.d_tgt, self.i_tgt, self.bh_tgt]
    }
}

/// Per-component min-max bounds of the observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateBounds {
    pub lo: [f64; STATE_DIM],
    pub hi: [f64; STATE_DIM],
}

impl StateBounds {
    /// Bounds from a grid over the region with 5 % padding on each
    /// element's span; the action slots use the action box.
    pub fn from_field(
        field: &dyn FieldSource,
        region: &Region,
        epoch: f64,
        max_distance: f64,
    ) -> Result<Self> {
        let nodes = crate::field::sample_grid(field, region, 21, 21, epoch)?;
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for n in &nodes {
            for (k, v) in n.elements.nav_triple().into_iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let mut b = Self {
            lo: [0.0; STATE_DIM],
            hi: [0.0; STATE_DIM],
        };
        for k in 0..3 {
            let span = (hi[k] - lo[k]).max(1e-9 * hi[k].abs().max(lo[k].abs())).max(1e-12);
            let pad = 0.05 * span;
            b.lo[k] = lo[k] - pad;
            b.hi[k] = hi[k] + pad;
            b.lo[k + 3] = b.lo[k];
            b.hi[k + 3] = b.hi[k];
        }
        b.lo[6] = 0.0;
        b.hi[6] = max_distance;
        b.lo[7] = -FRAC_PI_2;
        b.hi[7] = FRAC_PI_2;
        Ok(b)
    }

    /// Min-max scaling into `[0, 1]`, clipping anything outside the bounds.
    pub fn normalize(&self, s: &[f64; STATE_DIM]) -> [f64; STATE_DIM] {
        let mut out = [0.0; STATE_DIM];
        for k in 0..STATE_DIM {
            out[k] = ((s[k] - self.lo[k]) / (self.hi[k] - self.lo[k])).clamp(0.0, 1.0);
        }
        out
    }

    pub fn denormalize(&self, u: &[f64; STATE_DIM]) -> [f64; STATE_DIM] {
        let mut out = [0.0; STATE_DIM];
        for k in 0..STATE_DIM {
            out[k] = self.lo[k] + u[k] * (self.hi[k] - self.lo[k]);
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    /// Destination reward.
    pub zeta1: f64,
    /// Proximity weight.
    pub zeta2: f64,
    /// Alignment weight; 0 turns the alignment term off.
    pub zeta3: f64,
    pub decay_enabled: bool,
    /// Fixed objective threshold; `None` derives one per task from
    /// `EnvConfig::success_radius_m`.
    pub success_threshold: Option<f64>,
    /// Maximum steps per episode.
    pub n_max: usize,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            zeta1: 200.0,
            zeta2: 10.0,
            zeta3: 3.0,
            decay_enabled: true,
            success_threshold: None,
            n_max: 50,
        }
    }
}

impl RewardConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.zeta3 >= 0.0) {
            v.push(format!("reward.zeta3 = {} must be ≥ 0", self.zeta3));
        }
        if !(self.zeta2 > self.zeta3) {
            v.push(format!(
                "reward.zeta2 = {} must exceed zeta3 = {}",
                self.zeta2, self.zeta3
            ));
        }
        if !(self.zeta1 > self.zeta2) {
            v.push(format!(
                "reward.zeta1 = {} must exceed zeta2 = {}",
                self.zeta1, self.zeta2
            ));
        }
        if let Some(t) = self.success_threshold {
            if !(t > 0.0) {
                v.push(format!("reward.success_threshold = {t} must be > 0"));
            }
        }
        if self.n_max == 0 {
            v.push("reward.n_max must be ≥ 1".into());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SuccessCriterion {
    /// Objective below the (per-task) threshold; what a vehicle without
    /// position fixes can check.
    #[default]
    Objective,
    /// True planar distance below `success_radius_m`.
    Distance,
}

/// How the heading a yaw is applied to is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HeadingMode {
    /// `θ' = θ + ψ`: yaws accumulate from the initial heading `λ′₀`.
    #[default]
    Accumulated,
    /// `θ' = ψ_prev + ψ` in the east-north frame: the previous yaw alone is
    /// the angular displacement, so the heading is visible in the state.
    PreviousYaw,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub reward: RewardConfig,
    /// `L_max`, metres.
    pub max_distance_m: f64,
    /// Target radius used to derive the per-task objective threshold.
    pub success_radius_m: f64,
    pub success_criterion: SuccessCriterion,
    /// Parameter pair for the theoretical heading.
    pub heading_pair: [Element; 2],
    pub gradient_step_m: f64,
    pub heading_mode: HeadingMode,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            reward: RewardConfig::default(),
            max_distance_m: 50_000.0,
            success_radius_m: 10_000.0,
            success_criterion: SuccessCriterion::Objective,
            heading_pair: [Element::I, Element::BH],
            gradient_step_m: crate::field::DEFAULT_GRADIENT_STEP_M,
            heading_mode: HeadingMode::Accumulated,
        }
    }
}

impl EnvConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.reward.violations();
        if !(self.max_distance_m > 0.0 && self.max_distance_m.is_finite()) {
            v.push(format!("env.max_distance_m = {} must be > 0", self.max_distance_m));
        }
        if !(self.success_radius_m > 0.0) {
            v.push(format!(
                "env.success_radius_m = {} must be > 0",
                self.success_radius_m
            ));
        }
        if self.heading_pair[0] == self.heading_pair[1] {
            v.push("env.heading_pair must name two different elements".into());
        }
        if !(self.gradient_step_m > 0.0) {
            v.push(format!("env.gradient_step_m = {} must be > 0", self.gradient_step_m));
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub origin: GeoPosition,
    pub destination: GeoPosition,
    pub epoch: f64,
    pub seed: u64,
}

impl TaskSpec {
    pub fn validate(&self, region: &Region) -> Result<()> {
        if self.origin.latitude == self.destination.latitude
            && self.origin.longitude == self.destination.longitude
        {
            return Err(Error::Task("origin equals destination".into()));
        }
        for (name, p) in [("origin", &self.origin), ("destination", &self.destination)] {
            if !region.contains(p) {
                return Err(Error::Task(format!(
                    "{name} ({}, {}) outside region",
                    p.latitude, p.longitude
                )));
            }
        }
        Ok(())
    }
}

/// Diagnostics for one transition. Never part of the agent's observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub pose: VehiclePose,
    pub position: GeoPosition,
    pub objective: f64,
    pub threshold: f64,
    pub lambda_prime: f64,
    pub reward: RewardBreakdown,
    pub distance_to_target_m: f64,
    pub success: bool,
    pub timeout: bool,
    pub out_of_region: bool,
    pub objective_floored: bool,
    pub heading_fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: NavState,
    pub reward: f64,
    pub done: bool,
    /// `done` for a reason other than the step cap; drives bootstrapping.
    pub terminal: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone)]
struct Episode {
    task: TaskSpec,
    origin_elements: GeomagneticElements,
    target_elements: GeomagneticElements,
    target_xy: (f64, f64),
    threshold: f64,
    pose: VehiclePose,
    current: GeomagneticElements,
    prev_f: f64,
    lambda_prime: f64,
    last_action: NavAction,
    done: bool,
    trace: EpisodeTrace,
}

impl Episode {
    /// Pose the next yaw is applied to.
    fn motion_base(&self, mode: HeadingMode) -> VehiclePose {
        match mode {
            HeadingMode::Accumulated => self.pose,
            HeadingMode::PreviousYaw => VehiclePose {
                theta: self.last_action.yaw,
                ..self.pose
            },
        }
    }
}

/// One environment instance; cheap to clone (the field is shared).
#[derive(Clone)]
pub struct NavEnv {
    field: Arc<dyn FieldSource>,
    region: Region,
    frame: LocalFrame,
    config: EnvConfig,
    bounds: StateBounds,
    episode: Option<Episode>,
}

impl std::fmt::Debug for NavEnv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NavEnv")
            .field("field", &self.field.name())
            .field("region", &self.region)
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl NavEnv {
    pub fn new(
        field: Arc<dyn FieldSource>,
        region: Region,
        config: EnvConfig,
        bounds: StateBounds,
    ) -> Result<Self> {
        region.validate()?;
        let violations = config.violations();
        if !violations.is_empty() {
            return Err(Error::Config(violations));
        }
        Ok(Self {
            field,
            frame: region.frame(),
            region,
            config,
            bounds,
            episode: None,
        })
    }

    /// Builds the environment with observation bounds sampled from `field`
    /// at `epoch`.
    pub fn with_sampled_bounds(
        field: Arc<dyn FieldSource>,
        region: Region,
        config: EnvConfig,
        epoch: f64,
    ) -> Result<Self> {
        let bounds = StateBounds::from_field(field.as_ref(), &region, epoch, config.max_distance_m)?;
        Self::new(field, region, config, bounds)
    }

    pub fn field(&self) -> &Arc<dyn FieldSource> {
        &self.field
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut EnvConfig {
        &mut self.config
    }

    pub fn bounds(&self) -> &StateBounds {
        &self.bounds
    }

    pub fn max_distance(&self) -> f64 {
        self.config.max_distance_m
    }

    pub fn is_done(&self) -> bool {
        self.episode.as_ref().is_none_or(|e| e.done)
    }

    pub fn pose(&self) -> Option<VehiclePose> {
        self.episode.as_ref().map(|e| e.pose)
    }

    pub fn task(&self) -> Option<&TaskSpec> {
        self.episode.as_ref().map(|e| &e.task)
    }

    /// Objective threshold of the running episode.
    pub fn threshold(&self) -> Option<f64> {
        self.episode.as_ref().map(|e| e.threshold)
    }

    pub fn trace(&self) -> Option<&EpisodeTrace> {
        self.episode.as_ref().map(|e| &e.trace)
    }

    pub fn take_trace(&mut self) -> Option<EpisodeTrace> {
        self.episode.take().map(|e| e.trace)
    }

    pub fn state(&self) -> Option<NavState> {
        self.episode
            .as_ref()
            .map(|e| NavState::new(&e.current, &e.target_elements, e.last_action))
    }

    pub fn normalized_state(&self, s: &NavState) -> [f64; STATE_DIM] {
        self.bounds.normalize(&s.to_array())
    }

    fn pair_gradients(
        &self,
        pos: &GeoPosition,
        epoch: f64,
    ) -> Result<(GeomagneticElements, [GradientVector; 2])> {
        let e = self.field.elements(pos, epoch)?;
        let g = gradients(
            self.field.as_ref(),
            pos,
            epoch,
            &self.config.heading_pair,
            &self.frame,
            self.config.gradient_step_m,
        )?;
        Ok((e, [g[0], g[1]]))
    }

    fn heading_at(
        &self,
        here: &GeomagneticElements,
        grads: [GradientVector; 2],
        target: &GeomagneticElements,
    ) -> Heading {
        let [p1, p2] = self.config.heading_pair;
        let mut cur = [here.get(p1), here.get(p2)];
        let tgt = [target.get(p1), target.get(p2)];
        // Keep declination differences on the short arc.
        for (k, p) in [p1, p2].into_iter().enumerate() {
            if p == Element::D {
                cur[k] = tgt[k] + crate::field::wrap_pi(cur[k] - tgt[k]);
            }
        }
        theoretical_heading(cur, tgt, grads)
    }

    /// Objective threshold equivalent in area to a disc of
    /// `success_radius_m` around the target: `r² · sqrt(det A)` with
    /// `A = Σ g gᵀ / Δ²` the local quadratic form of the objective.
    fn derive_threshold(
        &self,
        target_pos: &GeoPosition,
        epoch: f64,
        origin: &GeomagneticElements,
        target: &GeomagneticElements,
    ) -> Result<f64> {
        if let Some(t) = self.config.reward.success_threshold {
            return Ok(t);
        }
        let g = gradients(
            self.field.as_ref(),
            target_pos,
            epoch,
            &Element::NAV,
            &self.frame,
            self.config.gradient_step_m,
        )?;
        let o = origin.nav_triple();
        let t = target.nav_triple();
        let (mut axx, mut axy, mut ayy) = (0.0, 0.0, 0.0);
        for k in 0..3 {
            let delta = if k == 0 {
                crate::field::wrap_pi(t[k] - o[k])
            } else {
                t[k] - o[k]
            };
            let den = (delta * delta).max(DENOMINATOR_FLOOR);
            axx += g[k].gx * g[k].gx / den;
            axy += g[k].gx * g[k].gy / den;
            ayy += g[k].gy * g[k].gy / den;
        }
        let r2 = self.config.success_radius_m.powi(2);
        let det = axx * ayy - axy * axy;
        let half_trace = 0.5 * (axx + ayy);
        let scale = if det > 1e-12 * half_trace * half_trace {
            det.sqrt()
        } else {
            half_trace
        };
        let zeta = r2 * scale;
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::Task(format!("cannot derive success threshold ({zeta})")));
        }
        Ok(zeta)
    }

    pub fn reset(&mut self, task: TaskSpec) -> Result<NavState> {
        task.validate(&self.region)?;
        let epoch = task.epoch;
        let (origin_elements, origin_grads) = self.pair_gradients(&task.origin, epoch)?;
        let target_elements = self.field.elements(&task.destination, epoch)?;
        let threshold =
            self.derive_threshold(&task.destination, epoch, &origin_elements, &target_elements)?;
        let lambda0 = self
            .heading_at(&origin_elements, origin_grads, &target_elements)
            .value_or(0.0);
        let (x0, y0) = self.frame.to_local(&task.origin);
        let target_xy = self.frame.to_local(&task.destination);
        let pose = VehiclePose {
            x: x0,
            y: y0,
            theta: match self.config.heading_mode {
                HeadingMode::Accumulated => lambda0,
                HeadingMode::PreviousYaw => 0.0,
            },
            step_index: 0,
        };
        let f0 = objective(
            &origin_elements.nav_triple(),
            &target_elements.nav_triple(),
            &origin_elements.nav_triple(),
        );
        let mut trace = EpisodeTrace::new((x0, y0), target_xy, threshold);
        trace.objective_floored = f0.floored;
        trace.rows.push(TraceRow {
            step: 0,
            lat: task.origin.latitude,
            lon: task.origin.longitude,
            x_m: x0,
            y_m: y0,
            theta_rad: pose.theta,
            l_m: 0.0,
            psi_rad: 0.0,
            f: f0.value,
            reward: 0.0,
            lambda_prime_rad: lambda0,
            done: false,
            success: false,
        });
        let last_action = NavAction::raw(0.0, 0.0);
        let state = NavState::new(&origin_elements, &target_elements, last_action);
        self.episode = Some(Episode {
            task,
            origin_elements,
            target_elements,
            target_xy,
            threshold,
            pose,
            current: origin_elements,
            prev_f: f0.value,
            lambda_prime: lambda0,
            last_action,
            done: false,
            trace,
        });
        Ok(state)
    }

    /// Objective at the position `action` would lead to, without moving.
    pub fn probe(&self, action: &NavAction) -> Result<f64> {
        let ep = self
            .episode
            .as_ref()
            .ok_or_else(|| Error::Usage("probe before reset".into()))?;
        let a = NavAction::new(action.distance, action.yaw, self.config.max_distance_m);
        let next = motion_update(&ep.motion_base(self.config.heading_mode), &a);
        let pos = self.frame.to_geo(next.x, next.y);
        let e = self.field.elements(&pos, ep.task.epoch)?;
        Ok(objective(
            &e.nav_triple(),
            &ep.target_elements.nav_triple(),
            &ep.origin_elements.nav_triple(),
        )
        .value)
    }

    pub fn step(&mut self, action: NavAction) -> Result<StepOutcome> {
        let max_distance = self.config.max_distance_m;
        let epoch = match &self.episode {
            Some(ep) if !ep.done => ep.task.epoch,
            Some(_) => return Err(Error::Usage("step on a finished episode".into())),
            None => return Err(Error::Usage("step before reset".into())),
        };
        let action = NavAction::new(action.distance, action.yaw, max_distance);
        let (pose, target_elements, origin_elements, prev_lambda, target_xy, threshold) = {
            let ep = self.episode.as_ref().expect("checked above");
            (
                motion_update(&ep.motion_base(self.config.heading_mode), &action),
                ep.target_elements,
                ep.origin_elements,
                ep.lambda_prime,
                ep.target_xy,
                ep.threshold,
            )
        };
        let position = self.frame.to_geo(pose.x, pose.y);
        let out_of_region = !self.region.contains(&position);

        let probe = self
            .pair_gradients(&position, epoch)
            .map(|(e, g)| (e, self.heading_at(&e, g, &target_elements)));
        let (current, heading) = match probe {
            Ok(v) => v,
            Err(err) if !out_of_region => return Err(err),
            Err(_) => {
                let ep = self.episode.as_ref().expect("checked above");
                (ep.current, Heading::Parallel)
            }
        };
        let heading_fallback = !matches!(heading, Heading::Valid(_));
        let lambda_prime = heading.value_or(prev_lambda);

        let f = objective(
            &current.nav_triple(),
            &target_elements.nav_triple(),
            &origin_elements.nav_triple(),
        );
        let distance_to_target_m = (target_xy.0 - pose.x).hypot(target_xy.1 - pose.y);
        let success = match self.config.success_criterion {
            SuccessCriterion::Objective => f.value < threshold,
            SuccessCriterion::Distance => distance_to_target_m < self.config.success_radius_m,
        } && !out_of_region;
        let ep = self.episode.as_mut().expect("checked above");
        let reward = compute_reward(
            ep.prev_f,
            f.value,
            &pose,
            lambda_prime,
            &self.config.reward,
            success,
        );
        let timeout = !success && pose.step_index >= self.config.reward.n_max;
        let done = success || timeout || out_of_region;

        ep.pose = pose;
        ep.current = current;
        ep.prev_f = f.value;
        ep.lambda_prime = lambda_prime;
        ep.last_action = action;
        ep.done = done;
        ep.trace.objective_floored |= f.floored;
        ep.trace.rows.push(TraceRow {
            step: pose.step_index,
            lat: position.latitude,
            lon: position.longitude,
            x_m: pose.x,
            y_m: pose.y,
            theta_rad: pose.theta,
            l_m: action.distance,
            psi_rad: action.yaw,
            f: f.value,
            reward: reward.total(),
            lambda_prime_rad: lambda_prime,
            done,
            success,
        });
        let state = NavState::new(&current, &target_elements, action);
        Ok(StepOutcome {
            state,
            reward: reward.total(),
            done,
            terminal: success || out_of_region,
            info: StepInfo {
                pose,
                position,
                objective: f.value,
                threshold,
                lambda_prime,
                reward,
                distance_to_target_m,
                success,
                timeout,
                out_of_region,
                objective_floored: f.floored,
                heading_fallback,
            },
        })
    }
}

/// Wraps any angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    crate::field::wrap_pi(a)
}

/// Bearing of `(dx, dy)` in the planar frame, radians from east.
pub fn bearing(dx: f64, dy: f64) -> f64 {
    dy.atan2(dx)
}

#[cfg(test)]
mod tests;
