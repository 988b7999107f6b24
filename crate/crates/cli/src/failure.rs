//! Exit codes and the one-line error format.

use hidimtest::Error;
use std::fmt;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Data,
    Numerical,
    Verification,
}

impl Kind {
    pub fn code(self) -> u8 {
        match self {
            Kind::Usage => 2,
            Kind::Data => 3,
            Kind::Numerical => 4,
            Kind::Verification => 5,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Kind::Usage => "usage",
            Kind::Data => "data",
            Kind::Numerical => "numerical",
            Kind::Verification => "verification",
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Kind::Usage, message)
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self::new(Kind::Data, message)
    }

    /// Prints `hidimtest: error[<kind>/<code>]: <message>` on one line to
    /// stderr and returns the matching exit code.
    pub fn report(&self) -> ExitCode {
        eprintln!("{self}");
        ExitCode::from(self.kind.code())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_line = self.message.replace(['\n', '\r'], " ");
        write!(
            f,
            "hidimtest: error[{}/{}]: {}",
            self.kind.label(),
            self.kind.code(),
            one_line.trim()
        )
    }
}

fn kind_of(err: &Error) -> Kind {
    match err {
        Error::InvalidInput(_)
        | Error::NonFinite { .. }
        | Error::DimensionMismatch { .. }
        | Error::TooFewObservations { .. }
        | Error::Schema(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => Kind::Data,
        Error::SingularCovariance { .. }
        | Error::DegenerateRatio { .. }
        | Error::ContourTooClose { .. }
        | Error::NonConvergent { .. } => Kind::Numerical,
        Error::InvalidParameter(_) | Error::Config(_) => Kind::Usage,
        Error::Replication { source, .. } => kind_of(source),
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(kind_of(&err), err.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_on_one_line() {
        let f = Failure::data("bad\nvalue");
        assert_eq!(f.to_string(), "hidimtest: error[data/3]: bad value");
    }

    #[test]
    fn maps_replication_errors_through() {
        let err = Error::Replication {
            p: 3,
            n: 2,
            replication: 7,
            source: Box::new(Error::SingularCovariance {
                p: 3,
                n: 2,
                reason: "x".into(),
            }),
        };
        assert_eq!(Failure::from(err).kind, Kind::Numerical);
    }
}
