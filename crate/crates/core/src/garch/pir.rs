//! Forward simulation of persona states, volatility and regime from a known
//! day, under an optional schedule of hypothesized shocks.
//!
//! Each simulated day runs, in order: decay, satellite update, shock, variance
//! update, macro recomputation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{gjr_step, GarchMode, ParamArsenal};
use crate::affect::{
    decay, satellite_step, DecayTable, SatelliteInputs, SatelliteRegimes, ShockConfig,
};
use crate::cogvec::{CognitiveVector, PersonaDayState};
use crate::error::{Error, Result};
use crate::macrostate::{
    mdi_between, quadrant_membership, MacroDynamics, MacroFeatures, MacroState, QuadrantMembership,
    QuadrantPrototypes, DEFAULT_MCFI_ALPHA,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PirConfig {
    pub decay: DecayTable,
    pub satellite: SatelliteRegimes,
    pub shock: ShockConfig,
    pub arsenal: ParamArsenal,
    pub garch_mode: GarchMode,
    pub prototypes: QuadrantPrototypes,
    pub mcfi_alpha: f64,
    /// Standard deviation of the Gaussian noise added to each innovation.
    pub noise_sd: f64,
}

impl Default for PirConfig {
    fn default() -> Self {
        Self {
            decay: DecayTable::default(),
            satellite: SatelliteRegimes::default(),
            shock: ShockConfig::default(),
            arsenal: ParamArsenal::default(),
            garch_mode: GarchMode::Dynamic,
            prototypes: QuadrantPrototypes::default(),
            mcfi_alpha: DEFAULT_MCFI_ALPHA,
            noise_sd: 0.0,
        }
    }
}

/// Value a decay anchor implies after `days` days.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Anchor {
    value: f64,
    days: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PirState {
    pub day: PersonaDayState,
    /// Conditional variance per registry dimension.
    pub h: Vec<f64>,
    pub macro_state: MacroState,
    pub dynamics: MacroDynamics,
    pub membership: QuadrantMembership,
    /// Shock applied on this day, if any.
    pub shock: Option<String>,
    /// Whether the market was past the fragility threshold when the shock hit.
    pub fragile: bool,
    anchors: [Vec<Anchor>; 2],
}

/// Power-law decay applied to the magnitude; the sign is kept.
fn decay_signed(anchor: Anchor, dim: &str, table: &DecayTable) -> Result<f64> {
    if anchor.days == 0 || anchor.value == 0.0 {
        return Ok(anchor.value);
    }
    let magnitude = decay(anchor.value.abs(), anchor.days as f64, dim, table)?;
    Ok(anchor.value.signum() * magnitude)
}

fn fresh_anchors(v: &CognitiveVector) -> Vec<Anchor> {
    v.scores()
        .iter()
        .map(|&value| Anchor { value, days: 0 })
        .collect()
}

impl PirState {
    /// Builds the starting snapshot. `previous` supplies the prior day's macro
    /// state for the velocity terms.
    pub fn initial(
        day: PersonaDayState,
        h0: f64,
        previous: Option<&MacroState>,
        cfg: &PirConfig,
    ) -> Result<Self> {
        if !(h0 >= 0.0) {
            return Err(Error::invalid("h0", "must be >= 0"));
        }
        let macro_state = MacroState::from_day(&day, cfg.mcfi_alpha)?;
        let dynamics = MacroDynamics {
            v_mdi: previous.map(|p| macro_state.mdi - p.mdi),
            v_mcfi: previous.map(|p| macro_state.mcfi - p.mcfi),
            a_mdi: None,
            a_mcfi: None,
        };
        let membership = quadrant_membership(
            &MacroFeatures::new(&macro_state, &dynamics),
            &cfg.prototypes,
        )?;
        let dims = day.registry().len();
        let anchors = [fresh_anchors(&day.novice), fresh_anchors(&day.veteran)];
        Ok(Self {
            day,
            h: vec![h0; dims],
            macro_state,
            dynamics,
            membership,
            shock: None,
            fragile: false,
            anchors,
        })
    }

    fn persona_mut(&mut self, slot: usize) -> &mut CognitiveVector {
        if slot == 0 {
            &mut self.day.novice
        } else {
            &mut self.day.veteran
        }
    }

    fn persona(&self, slot: usize) -> &CognitiveVector {
        if slot == 0 {
            &self.day.novice
        } else {
            &self.day.veteran
        }
    }
}

fn mean_scores(s: &PersonaDayState) -> Vec<f64> {
    s.novice
        .scores()
        .iter()
        .zip(s.veteran.scores())
        .map(|(a, b)| 0.5 * (a + b))
        .collect()
}

/// Simulates `horizon` days past `initial`. `shocks[k]` is the event class
/// hitting day `k + 1`; a shorter schedule means no further shocks.
pub fn pir_simulate(
    initial: &PirState,
    shocks: &[Option<String>],
    horizon: usize,
    cfg: &PirConfig,
    seed: u64,
) -> Result<Vec<PirState>> {
    if shocks.len() > horizon {
        return Err(Error::Misaligned(format!(
            "{} scheduled shocks for a {horizon}-day horizon",
            shocks.len()
        )));
    }
    for ev in shocks.iter().flatten() {
        cfg.shock.delta(ev)?;
    }
    let noise = if cfg.noise_sd > 0.0 {
        Some(
            Normal::new(0.0, cfg.noise_sd)
                .map_err(|e| Error::invalid("noise_sd", e.to_string()))?,
        )
    } else if cfg.noise_sd == 0.0 {
        None
    } else {
        return Err(Error::invalid("noise_sd", "must be >= 0"));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = initial.day.registry().clone();
    let idx = |dim: &str| registry.index_of(dim);

    let mut trajectory = Vec::with_capacity(horizon + 1);
    trajectory.push(initial.clone());

    for k in 0..horizon {
        let prev = trajectory.last().expect("non-empty");
        let mut next = prev.clone();
        next.day.date = prev
            .day
            .date
            .succ_opt()
            .ok_or_else(|| Error::invalid("date", "overflow"))?;
        next.shock = None;
        next.fragile = false;

        // Decay. Any value not produced by the anchor (satellite, shock,
        // caller edits) re-anchors first.
        for slot in 0..2 {
            for (i, label) in registry.labels().iter().enumerate() {
                let mut anchor = next.anchors[slot][i];
                let current = next.persona(slot).scores()[i];
                if decay_signed(anchor, label, &cfg.decay)? != current {
                    anchor = Anchor {
                        value: current,
                        days: 0,
                    };
                }
                anchor.days += 1;
                let value = decay_signed(anchor, label, &cfg.decay)?;
                next.anchors[slot][i] = anchor;
                next.persona_mut(slot).set_clamped(i, value);
            }
        }

        // Satellite models, with coefficients for the prevailing regime.
        let coeffs = cfg.satellite.for_quadrant(prev.membership.dominant);
        for slot in 0..2 {
            let before = prev.persona(slot);
            let now = next.persona(slot);
            let inputs = SatelliteInputs {
                joy: now.score_or_zero("joy"),
                v_joy: now.score_or_zero("joy") - before.score_or_zero("joy"),
                mcfi: prev.macro_state.mcfi,
                regret_lag: before.score_or_zero("regret"),
                v_mdi: prev.dynamics.v_mdi.unwrap_or(0.0),
            };
            let out = satellite_step(&inputs, coeffs);
            let unc = now.score_or_zero("uncertainty") + out.d_uncertainty;
            let v = next.persona_mut(slot);
            for (dim, value) in [
                ("fomo", out.fomo),
                ("greed", out.greed),
                ("regret", out.regret),
                ("uncertainty", unc),
            ] {
                if let Some(i) = idx(dim) {
                    v.set_clamped(i, value);
                }
            }
        }

        // Scheduled shock on both personas.
        if let Some(Some(event)) = shocks.get(k) {
            let current_mdi = mdi_between(&next.day.novice, &next.day.veteran)?;
            let delta = cfg.shock.delta(event)?;
            next.day.novice =
                crate::affect::shift_clamped(&next.day.novice, delta, cfg.shock.lambda)?;
            next.day.veteran =
                crate::affect::shift_clamped(&next.day.veteran, delta, cfg.shock.lambda)?;
            next.fragile = cfg.shock.is_fragile(current_mdi);
            next.shock = Some(event.clone());
        }

        // Variance update on the cross-persona mean.
        let params = cfg
            .arsenal
            .select(prev.membership.dominant, cfg.garch_mode)?;
        let before = mean_scores(&prev.day);
        let after = mean_scores(&next.day);
        for i in 0..registry.len() {
            let mut eps = after[i] - before[i];
            if let Some(n) = &noise {
                eps += n.sample(&mut rng);
            }
            next.h[i] = gjr_step(prev.h[i], eps, &params);
        }

        // Macro state, dynamics and regime.
        next.macro_state = MacroState::from_day(&next.day, cfg.mcfi_alpha)?;
        let v_mdi = next.macro_state.mdi - prev.macro_state.mdi;
        let v_mcfi = next.macro_state.mcfi - prev.macro_state.mcfi;
        next.dynamics = MacroDynamics {
            v_mdi: Some(v_mdi),
            v_mcfi: Some(v_mcfi),
            a_mdi: prev.dynamics.v_mdi.map(|p| v_mdi - p),
            a_mcfi: prev.dynamics.v_mcfi.map(|p| v_mcfi - p),
        };
        next.membership = quadrant_membership(
            &MacroFeatures::new(&next.macro_state, &next.dynamics),
            &cfg.prototypes,
        )?;
        trajectory.push(next);
    }
    Ok(trajectory)
}
