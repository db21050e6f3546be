use core::fmt;

/// Opaque 64-bit flow identifier.
///
/// [`FlowId::EMPTY`] (all ones) marks an unclaimed register slot and must never
/// appear in a trace.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FlowId(pub u64);

impl FlowId {
    pub const EMPTY: FlowId = FlowId(u64::MAX);

    #[inline]
    pub fn is_empty(self) -> bool {
        self == Self::EMPTY
    }
}

impl fmt::Debug for FlowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("FlowId(EMPTY)")
        } else {
            write!(f, "FlowId({})", self.0)
        }
    }
}

impl fmt::Display for FlowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<u64> for FlowId {
    fn from(v: u64) -> Self {
        FlowId(v)
    }
}

/// One stream element. `seq` is the 0-based position in the trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Packet {
    pub flow: FlowId,
    pub seq: u64,
}

impl Packet {
    pub fn new(flow: FlowId, seq: u64) -> Self {
        Packet { flow, seq }
    }
}
