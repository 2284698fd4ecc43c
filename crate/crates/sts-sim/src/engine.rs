use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sts_actuators::{set_configuration, Configuration, DualSpeedState};
use sts_control::{
    force_controller_step, AssistMode, AssistModeConfig, Direction, ForceCommand, ForceControllerParams, SpeedPi,
};
use sts_human::{
    acceleration, contact_forces, harness_force, reference_com, seated_reference, update_events, HumanParams,
    HumanState, ReferencePoint, StsReference,
};
use sts_kinematics::{forward_kinematics, inverse_kinematics, jacobian_dk, mat_vec, JointState, Vec2};

use crate::{
    actuator_rates, kinetic_energy, LogRow, Plant, RepetitionInfo, Scenario, ScenarioKind, SimError, SimLog,
    PHASE_DOWN, PHASE_HOLD, PHASE_PAUSE, PHASE_RISE, PHASE_UP,
};

/// Energy must not grow more than this factor over one window.
const DIVERGENCE_FACTOR: f64 = 10.0;
const DIVERGENCE_WINDOW: f64 = 1.0;
/// Energy scale below which growth is not judged.
const DIVERGENCE_FLOOR: f64 = 50.0;

pub fn run_scenario(scenario: &Scenario) -> Result<SimLog, SimError> {
    scenario.validate()?;
    match scenario.kind {
        ScenarioKind::Sts => run_sts(scenario),
        ScenarioKind::Transfer => run_transfer(scenario),
    }
}

/// Runs the with-robot and without-robot variants of the same user and seed.
pub fn transparency_pair(with_robot: &Scenario, without_robot: &Scenario) -> Result<(SimLog, SimLog), SimError> {
    if with_robot.human.resolve() != without_robot.human.resolve() {
        return Err(SimError::Config { field: "human".into(), message: "paired scenarios need identical users".into() });
    }
    if with_robot.seed != without_robot.seed {
        return Err(SimError::Config { field: "seed".into(), message: "paired scenarios need identical seeds".into() });
    }
    Ok((run_scenario(with_robot)?, run_scenario(without_robot)?))
}

fn rehab_plant(s: &Scenario) -> Plant {
    Plant {
        geom: s.geometry.clone(),
        masses: s.masses.clone(),
        spec_1: s.actuators.act1.clone(),
        spec_2: s.actuators.act2_hs.clone(),
        friction_1: s.plant_friction.act1,
        friction_2: s.plant_friction.act2_hs,
        damping: s.joint_damping,
        payload: 0.0,
    }
}

pub fn controller_params(s: &Scenario) -> ForceControllerParams {
    ForceControllerParams {
        geom: s.geometry.clone(),
        masses: s.masses.clone(),
        spec_1: s.actuators.act1.clone(),
        spec_2: s.actuators.act2_hs.clone(),
        friction_1: s.controller_friction.act1,
        friction_2: s.controller_friction.act2_hs,
        allow_peak: s.allow_peak,
        gravity_model: s.gravity_model,
    }
}

struct DivergenceGuard {
    window_steps: usize,
    count: usize,
    start_energy: f64,
}

impl DivergenceGuard {
    fn new(dt: f64) -> Self {
        Self { window_steps: (DIVERGENCE_WINDOW / dt).round().max(1.0) as usize, count: 0, start_energy: 0.0 }
    }

    fn check(&mut self, t: f64, energy: f64, state: &[f64]) -> Result<(), SimError> {
        if !energy.is_finite() || state.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NumericalDivergence { t, detail: "non-finite state".into() });
        }
        if self.count == 0 {
            self.start_energy = energy;
        }
        self.count += 1;
        if self.count == self.window_steps {
            self.count = 0;
            if energy > DIVERGENCE_FACTOR * self.start_energy.max(DIVERGENCE_FLOOR) {
                return Err(SimError::NumericalDivergence {
                    t,
                    detail: format!("kinetic energy grew from {:.3} J to {:.3} J", self.start_energy, energy),
                });
            }
        }
        Ok(())
    }
}

/// Coupled arm + user state for sit-to-stand runs.
struct StsSim<'a> {
    scenario: &'a Scenario,
    human: HumanParams,
    plant: Plant,
    ctrl: ForceControllerParams,
    q: JointState,
    h: HumanState,
    guard: DivergenceGuard,
}

impl<'a> StsSim<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        Self {
            scenario,
            human: scenario.human.resolve(),
            plant: rehab_plant(scenario),
            ctrl: controller_params(scenario),
            q: JointState::default(),
            h: HumanState::default(),
            guard: DivergenceGuard::new(scenario.dt),
        }
    }

    fn attached(&self) -> bool {
        self.scenario.robot_attached
    }

    fn reset(&mut self) -> Result<(), SimError> {
        self.h = HumanState::seated(&self.human);
        if self.attached() {
            self.q = inverse_kinematics(&self.scenario.geometry, self.human.harness_point(self.h.com))?;
        }
        Ok(())
    }

    fn harness(&self, q: &JointState, h: &HumanState) -> Vec2 {
        if !self.attached() {
            return [0.0, 0.0];
        }
        let e = forward_kinematics(&self.scenario.geometry, q);
        let anchor = self.human.harness_point(h.com);
        harness_force(&self.scenario.harness, [e.y, e.z], [e.vy, e.vz], anchor, h.vel)
    }

    fn command(&self, cfg: &AssistModeConfig) -> Result<ForceCommand, SimError> {
        if !self.attached() {
            return Ok(ForceCommand::default());
        }
        let w = crate::motor_speeds(&self.plant, &self.q);
        Ok(force_controller_step(&self.ctrl, cfg, &self.q, w)?)
    }

    /// One step; the returned row describes the state at the start of it.
    fn step(
        &mut self,
        t_ref: f64,
        reference: &dyn Fn(f64) -> ReferencePoint,
        cfg: &AssistModeConfig,
        rising: bool,
    ) -> Result<LogRow, SimError> {
        let dt = self.scenario.dt;
        let cmd = self.command(cfg)?;
        let commanded = [cmd.f1, cmd.f2];
        let attached = self.attached();
        let human = &self.human;

        let row = {
            let r = reference(t_ref);
            let fh = self.harness(&self.q, &self.h);
            let forces = contact_forces(human, &self.h, &r, fh);
            let acc = acceleration(human, &forces, fh);
            let e = forward_kinematics(&self.scenario.geometry, &self.q);
            let tx = if attached { self.plant.transmitted(&self.q, commanded) } else { [0.0, 0.0] };
            let v2 = actuator_rates(&self.scenario.geometry, &self.q)[1];
            let st = &cmd.stages;
            let b = |x: bool| if x { 1.0 } else { 0.0 };
            LogRow {
                q_a: self.q.q_a,
                q_c: self.q.q_c,
                qd_a: self.q.qd_a,
                qd_c: self.q.qd_c,
                e_y: if attached { e.y } else { 0.0 },
                e_z: if attached { e.z } else { 0.0 },
                e_vy: if attached { e.vy } else { 0.0 },
                e_vz: if attached { e.vz } else { 0.0 },
                f_des_y: st.f_desired[0],
                f_des_z: st.f_desired[1],
                f1_map: st.mapped[0],
                f2_map: st.mapped[1],
                f1_mass: st.mass_comp[0],
                f2_mass: st.mass_comp[1],
                f1_fric: st.friction_comp[0],
                f2_fric: st.friction_comp[1],
                f1_pre: st.pre_clamp[0],
                f2_pre: st.pre_clamp[1],
                f1_cmd: cmd.f1,
                f2_cmd: cmd.f2,
                f1_tx: tx[0],
                f2_tx: tx[1],
                sat_1: b(cmd.saturated_1),
                sat_2: b(cmd.saturated_2),
                vel_exc_1: b(cmd.velocity_exceeded_1),
                vel_exc_2: b(cmd.velocity_exceeded_2),
                v2: if attached { v2 } else { 0.0 },
                com_y: self.h.com[0],
                com_z: self.h.com[1],
                com_vy: self.h.vel[0],
                com_vz: self.h.vel[1],
                com_ay: acc[0],
                com_az: acc[1],
                ref_y: r.pos[0],
                ref_z: r.pos[1],
                chair_fz: forces.chair_fz,
                feet_fy: forces.feet[0],
                feet_fz: forces.feet[1],
                harness_fy: fh[0],
                harness_fz: fh[1],
                seat_off: b(self.h.seat_off),
                sat_back: b(self.h.sat_back),
                ..Default::default()
            }
        };

        let h0 = self.h;
        let x0 = [
            self.q.q_a, self.q.q_c, self.q.qd_a, self.q.qd_c, h0.com[0], h0.com[1], h0.vel[0], h0.vel[1],
        ];
        let geom = &self.scenario.geometry;
        let plant = &self.plant;
        let harness_params = &self.scenario.harness;
        let x1 = crate::rk4(&x0, dt, |tau, x| {
            let q = JointState { q_a: x[0], q_c: x[1], qd_a: x[2], qd_c: x[3] };
            let hs = HumanState { com: [x[4], x[5]], vel: [x[6], x[7]], ..h0 };
            let r = reference(t_ref + tau);
            let fh = if attached {
                let ep = geom.effector_position(q.q_a, q.q_c);
                let ev = mat_vec(&jacobian_dk(geom, &q), [q.qd_a, q.qd_c]);
                harness_force(harness_params, ep, ev, human.harness_point(hs.com), hs.vel)
            } else {
                [0.0, 0.0]
            };
            let forces = contact_forces(human, &hs, &r, fh);
            let ha = acceleration(human, &forces, fh);
            let qa = if attached { plant.acceleration(&q, commanded, [-fh[0], -fh[1]], false) } else { [0.0, 0.0] };
            [x[2], x[3], qa[0], qa[1], x[6], x[7], ha[0], ha[1]]
        });
        let mut q1 = JointState { q_a: x1[0], q_c: x1[1], qd_a: x1[2], qd_c: x1[3] };
        let mut limit_hit = false;
        if attached {
            limit_hit = self.plant.enforce_limits(&mut q1);
        }
        self.q = q1;
        self.h.com = [x1[4], x1[5]];
        self.h.vel = [x1[6], x1[7]];
        let r1 = reference(t_ref + dt);
        let fh1 = self.harness(&self.q, &self.h);
        let forces1 = contact_forces(human, &self.h, &r1, fh1);
        update_events(human, &mut self.h, &forces1, rising, dt);

        let energy = kinetic_energy(geom, &plant.masses, 0.0, &self.q)
            + 0.5 * human.mass * (self.h.vel[0].powi(2) + self.h.vel[1].powi(2));
        self.guard.check(t_ref, energy, &x1)?;
        let mut row = row;
        row.limit_hit = if limit_hit { 1.0 } else { 0.0 };
        Ok(row)
    }
}

fn settle_config(cfg: &AssistModeConfig) -> AssistModeConfig {
    // the spring is armed at rise onset; keep only the vertical unloading
    if cfg.mode == AssistMode::CoMBalance {
        AssistModeConfig { mode: AssistMode::WeightUnloading, ky: 0.0, ..cfg.clone() }
    } else {
        cfg.clone()
    }
}

fn run_sts(s: &Scenario) -> Result<SimLog, SimError> {
    let mut sim = StsSim::new(s);
    let human = sim.human.clone();
    let cfg = s.assist_config();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut log = SimLog { dt: s.dt, user_mass: human.mass, user_height: human.height, ..Default::default() };
    let seated = seated_reference(&human);
    let hold_seated = move |_: f64| seated;
    let settle_cfg = settle_config(&cfg);
    let settle_steps = (s.settle / s.dt).round() as usize;
    let mut t_log = 0.0;

    for rep in 0..s.repetitions {
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let duration = s.sts_duration * (1.0 + s.duration_jitter * u);
        sim.reset()?;
        for k in 0..settle_steps {
            sim.step(k as f64 * s.dt - s.settle, &hold_seated, &settle_cfg, false)?;
        }
        let e_yi = if s.robot_attached { forward_kinematics(&s.geometry, &sim.q).y } else { human.harness_point(sim.h.com)[0] };
        let armed = cfg.armed_at(e_yi);
        let sts = StsReference { duration };
        let steps = ((duration + s.pause) / s.dt).round() as usize;
        let start = log.rows.len();
        for k in 0..steps {
            let t_rep = k as f64 * s.dt;
            let sat_back = sim.h.sat_back;
            let reference = |t: f64| if sat_back { seated } else { reference_com(&human, &sts, t) };
            let mut row = sim.step(t_rep, &reference, &armed, true)?;
            row.t = t_log;
            row.rep = rep as f64;
            row.t_rep = t_rep;
            row.phase = if t_rep < duration { PHASE_RISE } else { PHASE_PAUSE };
            log.rows.push(row);
            t_log += s.dt;
        }
        log.repetitions.push(RepetitionInfo { index: rep, sts_duration: duration, start, len: steps });
    }
    Ok(log)
}

fn run_transfer(s: &Scenario) -> Result<SimLog, SimError> {
    let t = &s.transfer;
    let geom = &s.geometry;
    let plant = Plant {
        geom: geom.clone(),
        masses: s.masses.clone(),
        spec_1: s.actuators.act1.clone(),
        spec_2: s.actuators.act2_hf.clone(),
        friction_1: s.plant_friction.act1,
        friction_2: s.plant_friction.act2_hf,
        damping: s.joint_damping,
        payload: t.payload,
    };
    let mut q = JointState::at(t.q_a_locked, t.q_c_bottom);
    let config = set_configuration(DualSpeedState::rehabilitation(), Configuration::Transfer, [q.qd_a, q.qd_c])?;
    let brake = config.brake_1_engaged;
    let up = t.controller(Direction::Up);
    // bumpless start: the integrator already holds the static belt tension
    let g = crate::gravity_with_payload(geom, &plant.masses, plant.payload, &q);
    let hold_tension = (-g[1] / sts_kinematics::dl2_dqc(geom, q.q_c)).clamp(0.0, plant.spec_2.f_max_peak);
    let mut pi = SpeedPi::preloaded(hold_tension, up.ki);
    let mut guard = DivergenceGuard::new(s.dt);
    let mut log = SimLog { dt: s.dt, user_mass: t.payload, user_height: 0.0, ..Default::default() };
    let travel = (geom.effector_position(t.q_a_locked, t.q_c_top)[1] - geom.effector_position(t.q_a_locked, t.q_c_bottom)[1]).abs();
    let max_move = ((3.0 * travel / t.v_z_target + 10.0) / s.dt).round() as usize;
    let hold_steps = (t.hold / s.dt).round() as usize;
    let mut t_log = 0.0;

    let mut step = |q: &mut JointState, pi: &mut SpeedPi, v_z: f64, t_now: f64| -> Result<LogRow, SimError> {
        let v2 = actuator_rates(geom, q)[1];
        let cmd = pi.step_at(geom, &plant.spec_2, &up, v_z, q.q_c, v2, s.dt)?;
        let commanded = [0.0, cmd.f2];
        let tx = plant.transmitted(q, commanded);
        let e = forward_kinematics(geom, q);
        let row = LogRow {
            q_a: q.q_a,
            q_c: q.q_c,
            qd_a: q.qd_a,
            qd_c: q.qd_c,
            e_y: e.y,
            e_z: e.z,
            e_vy: e.vy,
            e_vz: e.vz,
            f2_pre: cmd.f2,
            f2_cmd: cmd.f2,
            f1_tx: tx[0],
            f2_tx: tx[1],
            sat_2: if cmd.saturated { 1.0 } else { 0.0 },
            vel_exc_2: if v2.abs() > plant.spec_2.v_max_load { 1.0 } else { 0.0 },
            v2,
            v2_ref: cmd.v2_ref,
            ..Default::default()
        };
        let x0 = [q.q_c, q.qd_c];
        let qa = q.q_a;
        let x1 = crate::rk4(&x0, s.dt, |_, x| {
            let qs = JointState { q_a: qa, q_c: x[0], qd_a: 0.0, qd_c: x[1] };
            let acc = plant.acceleration(&qs, commanded, [0.0, 0.0], brake);
            [x[1], acc[1]]
        });
        *q = JointState { q_a: qa, q_c: x1[0], qd_a: 0.0, qd_c: x1[1] };
        let hit = plant.enforce_limits(q);
        guard.check(t_now, kinetic_energy(geom, &plant.masses, plant.payload, q), &x1)?;
        let mut row = row;
        row.limit_hit = if hit { 1.0 } else { 0.0 };
        Ok(row)
    };

    for k in 0..(s.settle / s.dt).round() as usize {
        step(&mut q, &mut pi, 0.0, k as f64 * s.dt)?;
    }
    for rep in 0..s.repetitions {
        let start = log.rows.len();
        let mut t_rep = 0.0;
        let phases = [(PHASE_UP, up.v_z_target), (PHASE_HOLD, 0.0), (PHASE_DOWN, -up.v_z_target), (PHASE_HOLD, 0.0)];
        for (phase, v_z) in phases {
            let mut n = 0usize;
            loop {
                let done = if phase == PHASE_UP {
                    q.q_c <= t.q_c_top
                } else if phase == PHASE_DOWN {
                    q.q_c >= t.q_c_bottom
                } else {
                    n >= hold_steps
                };
                if done || n > max_move {
                    break;
                }
                let mut row = step(&mut q, &mut pi, v_z, t_log)?;
                row.t = t_log;
                row.rep = rep as f64;
                row.t_rep = t_rep;
                row.phase = phase;
                log.rows.push(row);
                t_log += s.dt;
                t_rep += s.dt;
                n += 1;
            }
        }
        let len = log.rows.len() - start;
        log.repetitions.push(RepetitionInfo { index: rep, sts_duration: 0.0, start, len });
    }
    Ok(log)
}

