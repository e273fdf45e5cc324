use serde::Serialize;
use sha2::{Digest, Sha256};

/// Short stable fingerprint of a serializable configuration: the first 16
/// hex digits of the SHA-256 of its JSON form.
pub fn config_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("configuration serializes");
    let digest = Sha256::digest(&json);
    hex::encode(&digest[..8])
}
