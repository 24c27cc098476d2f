//! Discrepancies between the published closed forms and their verified
//! counterparts. Each entry is backed by a test that evaluates both.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub id: &'static str,
    pub subject: &'static str,
    pub summary: &'static str,
}

pub const KERNEL_FINDINGS: &[Finding] = &[
    Finding {
        id: "K1",
        subject: "abrupt cutoff, s = 1/2 and 3/2",
        summary: "1F2 argument printed as +(Lambda tau)^2/4; the cosine transform gives -(Lambda tau)^2/4",
    },
    Finding {
        id: "K2",
        subject: "abrupt cutoff, low temperature, s = 1/2 and 3/2",
        summary: "spurious Omega_th factor in the low-temperature entries",
    },
    Finding {
        id: "K3",
        subject: "s = 1/2 and 3/2 tables",
        summary: "Gamma-function and error-function columns are attached to the wrong cutoffs (exponential and Drude-Lorentz swapped)",
    },
    Finding {
        id: "K4",
        subject: "error-function high-temperature entries",
        summary: "overall gamma factor missing",
    },
    Finding {
        id: "K5",
        subject: "error-function low-temperature entry, s = 3/2",
        summary: "tau^{1/4} where tau^{1/2} is required",
    },
    Finding {
        id: "K6",
        subject: "Drude-Lorentz, s = 1, high and low temperature",
        summary: "printed cot(Lambda/Omega_th) cosh(Lambda tau) forms do not reduce to the limits; HT is (pi gamma Omega_th Lambda/2) e^{-Lambda tau}, LT is -(gamma Lambda^2/2)[e^{-x}Ei(x) - e^{x}E1(x)]",
    },
    Finding {
        id: "K7",
        subject: "Drude-Lorentz, s = 1, exact regime",
        summary: "Lerch transcendent printed at z = exp(+pi Omega_th tau), outside its series domain; the Matsubara sum uses z = exp(-pi Omega_th tau)",
    },
];

pub const COEFFICIENT_FINDINGS: &[Finding] = &[
    Finding {
        id: "C1",
        subject: "lambda_2 closed forms",
        summary: "every lambda_2 assembly needs an overall 1/(AB) with AB = -A'B'",
    },
    Finding {
        id: "C2",
        subject: "Drude-Lorentz g1, g2",
        summary: "cos/sin(Lambda t) should be cosh/sinh(Lambda t) and the second group carries a missing Lambda^2",
    },
    Finding {
        id: "C3",
        subject: "exponential g6, g8",
        summary: "Si(v/Lambda) should be the hyperbolic sine integral, i.e. -i Si(i v/Lambda)",
    },
    Finding {
        id: "C4",
        subject: "exponential g7",
        summary: "trailing A' should be the frequency argument z",
    },
    Finding {
        id: "C5",
        subject: "Drude-Lorentz low temperature",
        summary: "printed lambda is the time integral of the printed kernel (finding K6) and inherits its error",
    },
    Finding {
        id: "C6",
        subject: "high-temperature decoherence rate",
        summary: "printed rate omits a factor pi; fitted rate is pi times the printed value",
    },
    Finding {
        id: "C7",
        subject: "low-temperature power law",
        summary: "printed log c is twice the value recovered from the log-log intercept, which is gamma_E + ln Lambda",
    },
];

pub fn all() -> impl Iterator<Item = &'static Finding> {
    KERNEL_FINDINGS.iter().chain(COEFFICIENT_FINDINGS.iter())
}
