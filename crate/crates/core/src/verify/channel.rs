//! Transports carrying signature frames from Alice to Bob.

use std::collections::VecDeque;
use std::io::{self, Read, Write};

use crate::error::{NblError, Result};

use super::wire::{decode_header, payload_len, HEADER_LEN};

pub trait Channel {
    fn send(&mut self, frame: &[u8]) -> Result<()>;

    /// Next complete frame.
    fn recv(&mut self) -> Result<Vec<u8>>;
}

/// FIFO of whole frames, for in-process Monte Carlo.
#[derive(Debug, Default)]
pub struct MemoryChannel {
    queue: VecDeque<Vec<u8>>,
}

impl MemoryChannel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }
}

impl Channel for MemoryChannel {
    fn send(&mut self, frame: &[u8]) -> Result<()> {
        self.queue.push_back(frame.to_vec());
        Ok(())
    }

    fn recv(&mut self) -> Result<Vec<u8>> {
        self.queue.pop_front().ok_or_else(|| {
            NblError::Transport(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                "no frame pending",
            ))
        })
    }
}

/// Frames over a byte stream; boundaries come from the length in the header.
#[derive(Debug)]
pub struct StreamChannel<R, W> {
    reader: R,
    writer: W,
}

impl<R: Read, W: Write> StreamChannel<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self { reader, writer }
    }

    pub fn into_parts(self) -> (R, W) {
        (self.reader, self.writer)
    }
}

impl<R: Read, W: Write> Channel for StreamChannel<R, W> {
    fn send(&mut self, frame: &[u8]) -> Result<()> {
        self.writer.write_all(frame)?;
        self.writer.flush()?;
        Ok(())
    }

    fn recv(&mut self) -> Result<Vec<u8>> {
        let mut frame = vec![0u8; HEADER_LEN];
        self.reader.read_exact(&mut frame)?;
        let header = decode_header(&frame)?;
        let body = payload_len(header.k as usize);
        frame.resize(HEADER_LEN + body, 0);
        self.reader.read_exact(&mut frame[HEADER_LEN..])?;
        Ok(frame)
    }
}
