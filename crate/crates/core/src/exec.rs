use alloc::vec::Vec;

/// Runs a family of independent chunk jobs and returns their results in
/// chunk order.
///
/// Implementations may run chunks concurrently, but the returned vector must
/// be indexed by chunk number. Callers fix the chunking themselves, so the
/// merged result never depends on how many workers ran.
pub trait Executor: Sync {
    fn map_chunks<T, F>(&self, chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every chunk in order on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_chunks<T, F>(&self, chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..chunks).map(job).collect()
    }
}

/// Number of chunks of width `chunk` needed to cover `len` items.
pub(crate) fn chunk_count(len: u64, chunk: u64) -> usize {
    len.div_ceil(chunk) as usize
}
