//! Piecewise pulse schedules for the two Raman lasers.

use super::QdynError;

/// Envelope shape over one segment of duration T.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// Constant at `peak`.
    Constant,
    /// peak · sin²(πt / 2T): 0 → peak with zero slope at both ends.
    RampUp,
    /// peak · cos²(πt / 2T): peak → 0 with zero slope at both ends.
    RampDown,
}

/// One laser's envelope over one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub kind: EnvelopeKind,
    /// Peak Rabi frequency (rad/μs); the constant value for `Constant`.
    pub peak: f64,
}

impl Envelope {
    pub const fn constant(peak: f64) -> Self {
        Self { kind: EnvelopeKind::Constant, peak }
    }

    pub const fn off() -> Self {
        Self::constant(0.0)
    }

    pub const fn ramp_up(peak: f64) -> Self {
        Self { kind: EnvelopeKind::RampUp, peak }
    }

    pub const fn ramp_down(peak: f64) -> Self {
        Self { kind: EnvelopeKind::RampDown, peak }
    }

    /// Value at local time t ∈ [0, duration].
    #[inline]
    pub fn value(&self, t: f64, duration: f64) -> f64 {
        match self.kind {
            EnvelopeKind::Constant => self.peak,
            EnvelopeKind::RampUp => {
                let s = (0.5 * std::f64::consts::PI * t / duration).sin();
                self.peak * s * s
            }
            EnvelopeKind::RampDown => {
                let c = (0.5 * std::f64::consts::PI * t / duration).cos();
                self.peak * c * c
            }
        }
    }
}

/// One schedule segment: a duration and an envelope per laser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub omega1: Envelope,
    pub omega2: Envelope,
}

/// Ordered sequence of segments with continuous envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    segments: Vec<Segment>,
    total: f64,
}

impl PulseSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self, QdynError> {
        if segments.is_empty() {
            return Err(QdynError::InvalidParameter("schedule has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if s.duration <= 0.0 || !s.duration.is_finite() {
                return Err(QdynError::InvalidParameter(format!(
                    "segment {i} duration {} must be > 0",
                    s.duration
                )));
            }
            for env in [s.omega1, s.omega2] {
                if env.peak < 0.0 || !env.peak.is_finite() {
                    return Err(QdynError::InvalidParameter(format!(
                        "segment {i} peak {} must be ≥ 0",
                        env.peak
                    )));
                }
            }
        }
        // continuity at the joints, per laser; an instantaneous switch to or
        // from exactly zero (laser on/off) is allowed
        for i in 0..segments.len() - 1 {
            let a = &segments[i];
            let b = &segments[i + 1];
            for (ea, eb) in [(a.omega1, b.omega1), (a.omega2, b.omega2)] {
                let end = ea.value(a.duration, a.duration);
                let start = eb.value(0.0, b.duration);
                if end == 0.0 || start == 0.0 {
                    continue;
                }
                let scale = end.abs().max(start.abs()).max(1.0);
                if (end - start).abs() > 1e-9 * scale {
                    return Err(QdynError::InvalidParameter(format!(
                        "envelope discontinuity at segment {i}→{}: {end} vs {start}",
                        i + 1
                    )));
                }
            }
        }
        let total = segments.iter().map(|s| s.duration).sum();
        Ok(Self { segments, total })
    }

    /// A single constant-Ω segment (square pulse).
    pub fn constant(duration: f64, omega1: f64, omega2: f64) -> Result<Self, QdynError> {
        Self::new(vec![Segment {
            duration,
            omega1: Envelope::constant(omega1),
            omega2: Envelope::constant(omega2),
        }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.total
    }

    /// (Ω₁, Ω₂) at global time t ∈ [0, total_duration].
    pub fn omegas_at(&self, t: f64) -> (f64, f64) {
        let mut t = t.clamp(0.0, self.total);
        for seg in &self.segments {
            if t <= seg.duration {
                return (seg.omega1.value(t, seg.duration), seg.omega2.value(t, seg.duration));
            }
            t -= seg.duration;
        }
        let last = self.segments.last().unwrap();
        (
            last.omega1.value(last.duration, last.duration),
            last.omega2.value(last.duration, last.duration),
        )
    }
}

/// Timing and peak Rabi frequencies of the STIRAP sequence.
///
/// Defaults reproduce the round-trip transfer model: 5 μs sin² ramps,
/// 1 μs laser-1 cleanup plateau, 2 μs dark hold, both peaks 2π×10 rad/μs.
/// The peaks are the full-power transfer values; the probe-level Ω₁ used for
/// dark-resonance spectroscopy is far too weak to drive an adiabatic
/// transfer (see `stirap_schedule` docs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirapTiming {
    /// Transfer ramp duration (μs).
    pub ramp: f64,
    /// Laser-1-only plateau after the forward ramp (μs), removing any
    /// population left in |f⟩.
    pub cleanup: f64,
    /// Dark hold τ_h between the transfers (μs).
    pub hold: f64,
    /// Peak Ω₁ (rad/μs).
    pub peak_omega1: f64,
    /// Peak Ω₂ (rad/μs).
    pub peak_omega2: f64,
}

impl Default for StirapTiming {
    fn default() -> Self {
        Self {
            ramp: 5.0,
            cleanup: 1.0,
            hold: 2.0,
            peak_omega1: crate::units::mhz(10.0),
            peak_omega2: crate::units::mhz(10.0),
        }
    }
}

impl StirapTiming {
    /// Global time of the middle of the dark hold (forward sequence first).
    pub fn hold_midpoint(&self) -> f64 {
        self.ramp + self.cleanup + 0.5 * self.hold
    }
}

/// Build the counter-intuitive STIRAP pulse sequence.
///
/// Forward transfer: laser 2 starts at peak while laser 1 is off; over one
/// ramp laser 1 rises as laser 2 falls, rotating the dark state from |f⟩ to
/// |g⟩. A laser-1-only cleanup plateau follows, then a dark hold with both
/// lasers off. With `roundtrip` the mirrored sequence (cleanup plateau, then
/// reversed ramp) brings the population back to |f⟩.
pub fn stirap_schedule(timing: &StirapTiming, roundtrip: bool) -> Result<PulseSchedule, QdynError> {
    let t = timing;
    for (name, v) in [("ramp", t.ramp), ("cleanup", t.cleanup), ("hold", t.hold)] {
        if v <= 0.0 || !v.is_finite() {
            return Err(QdynError::InvalidParameter(format!("{name} duration {v} must be > 0")));
        }
    }
    let mut segs = vec![
        Segment {
            duration: t.ramp,
            omega1: Envelope::ramp_up(t.peak_omega1),
            omega2: Envelope::ramp_down(t.peak_omega2),
        },
        Segment {
            duration: t.cleanup,
            omega1: Envelope::constant(t.peak_omega1),
            omega2: Envelope::off(),
        },
        Segment {
            duration: t.hold,
            omega1: Envelope::off(),
            omega2: Envelope::off(),
        },
    ];
    if roundtrip {
        segs.push(Segment {
            duration: t.cleanup,
            omega1: Envelope::constant(t.peak_omega1),
            omega2: Envelope::off(),
        });
        segs.push(Segment {
            duration: t.ramp,
            omega1: Envelope::ramp_down(t.peak_omega1),
            omega2: Envelope::ramp_up(t.peak_omega2),
        });
    }
    // the joints between ramp end (0 or peak) and plateaus are discontinuous
    // for laser 1 only if cleanup were misconfigured; `new` re-checks.
    PulseSchedule::new(segs)
}
