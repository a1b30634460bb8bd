use super::{enumerate_switching_flows, CertificateError, Flow};
use crate::engine::decide;
use crate::graph::Instance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    /// A switching flow that is not componentwise above the profile.
    NotDominating(Flow),
    /// A switching flow other than the profile whose Σ is no larger.
    SigmaNotAbove(Flow),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityReport {
    pub profile: Flow,
    pub flows_examined: usize,
    /// Whether the profile itself showed up among the enumerated flows.
    pub profile_enumerated: bool,
    pub counterexamples: Vec<Counterexample>,
}

impl MinimalityReport {
    pub fn confirmed(&self) -> bool {
        self.profile_enumerated && self.counterexamples.is_empty()
    }
}

/// Compares the run profile against every switching flow with entries up
/// to `cap`: the profile must lie below each of them and be the only one
/// attaining the minimum total.
pub fn check_minimality(instance: &Instance, cap: u64) -> Result<MinimalityReport, CertificateError> {
    let decision = decide(instance, None).expect("unbounded decide always halts");
    let profile = decision.profile().ok_or(CertificateError::RunCycles)?.clone();
    let max = profile.max_value();
    if max > cap.into() {
        return Err(CertificateError::CapBelowProfile {
            cap,
            max: max.to_string(),
        });
    }

    let flows = enumerate_switching_flows(instance, cap)?;
    let sigma = profile.total();
    let mut counterexamples = Vec::new();
    let mut profile_enumerated = false;
    for flow in &flows {
        if *flow == profile {
            profile_enumerated = true;
            continue;
        }
        if !profile.le(flow) {
            counterexamples.push(Counterexample::NotDominating(flow.clone()));
        } else if flow.total() <= sigma {
            counterexamples.push(Counterexample::SigmaNotAbove(flow.clone()));
        }
    }

    Ok(MinimalityReport {
        profile,
        flows_examined: flows.len(),
        profile_enumerated,
        counterexamples,
    })
}
