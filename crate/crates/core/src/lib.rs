pub mod criteria;
pub mod datum;
pub mod oracle;
pub mod partition;
pub mod perm;
pub mod ratmap;
pub mod sample;
pub mod shape;
pub mod split;
