use std::collections::VecDeque;
use std::sync::Arc;

use crate::ir::Command;

/// The command list `K` of one struct instance.
///
/// Stored as a queue of shared slices so that entering an `If` body or
/// loading a step never copies commands. The logical list is the
/// concatenation of the remaining part of every frame, front first.
/// Exhausted frames are dropped eagerly, so the list is empty iff there are
/// no frames.
#[derive(Debug, Clone, Default)]
pub struct CommandList {
    frames: VecDeque<Frame>,
}

#[derive(Debug, Clone)]
struct Frame {
    cmds: Arc<[Command]>,
    pos: usize,
    /// Finishing this frame finishes an appended iterator block.
    ends_block: bool,
}

impl Frame {
    fn rest(&self) -> &[Command] {
        &self.cmds[self.pos..]
    }
}

impl CommandList {
    pub fn load(body: Arc<[Command]>) -> Self {
        let mut list = Self::default();
        if !body.is_empty() {
            list.frames.push_back(Frame { cmds: body, pos: 0, ends_block: false });
        }
        list
    }

    /// Loads an iterator block as the whole list.
    pub fn load_block(block: Arc<[Command]>) -> Self {
        let mut list = Self::default();
        list.append_block(block);
        list
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn len(&self) -> usize {
        self.frames.iter().map(|f| f.cmds.len() - f.pos).sum()
    }

    pub fn head(&self) -> Option<&Command> {
        self.frames.front().map(|f| &f.cmds[f.pos])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Command> {
        self.frames.iter().flat_map(|f| f.rest().iter())
    }

    pub fn to_vec(&self) -> Vec<Command> {
        self.iter().cloned().collect()
    }

    /// Appends `block` at the end of the list.
    pub fn append_block(&mut self, block: Arc<[Command]>) {
        if !block.is_empty() {
            self.frames.push_back(Frame { cmds: block, pos: 0, ends_block: true });
        }
    }

    /// Drops the head command. Returns whether this finished a block.
    pub fn advance(&mut self) -> bool {
        let front = self.frames.front_mut().expect("advance on empty command list");
        front.pos += 1;
        if front.pos == front.cmds.len() {
            return self.frames.pop_front().expect("front").ends_block;
        }
        false
    }

    /// Replaces the head command with `body`. Returns whether this finished
    /// a block (only when `body` is empty and the head ended one).
    pub fn enter(&mut self, body: Arc<[Command]>) -> bool {
        let front = self.frames.front_mut().expect("enter on empty command list");
        front.pos += 1;
        let mut inherits = false;
        if front.pos == front.cmds.len() {
            inherits = self.frames.pop_front().expect("front").ends_block;
        }
        if body.is_empty() {
            return inherits;
        }
        self.frames.push_front(Frame { cmds: body, pos: 0, ends_block: inherits });
        false
    }

    /// Whether the logical list ends with exactly `block` as a suffix.
    pub fn ends_with(&self, block: &Arc<[Command]>) -> bool {
        if block.is_empty() {
            return true;
        }
        if let Some(last) = self.frames.back() {
            if last.pos == 0 && Arc::ptr_eq(&last.cmds, block) {
                return true;
            }
        }
        let mut want = block.iter().rev();
        for frame in self.frames.iter().rev() {
            for cmd in frame.rest().iter().rev() {
                match want.next() {
                    None => return true,
                    Some(w) if w == cmd => {}
                    Some(_) => return false,
                }
            }
        }
        want.next().is_none()
    }
}

impl PartialEq for CommandList {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().eq(other.iter())
    }
}

impl Eq for CommandList {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Value;

    fn push(n: i64) -> Command {
        Command::Push(Value::Int(n))
    }

    #[test]
    fn if_body_inherits_block_end() {
        let block: Arc<[Command]> = Arc::from(vec![push(1), Command::If(Arc::from(vec![push(2)]))]);
        let mut k = CommandList::load_block(block);
        assert!(!k.advance());
        let Some(Command::If(body)) = k.head().cloned() else { panic!() };
        assert!(!k.enter(body));
        assert_eq!(k.to_vec(), vec![push(2)]);
        assert!(k.advance());
        assert!(k.is_empty());
    }

    #[test]
    fn suffix_check_is_structural() {
        let block: Arc<[Command]> = Arc::from(vec![push(1), push(2)]);
        let copy: Arc<[Command]> = Arc::from(vec![push(1), push(2)]);
        let mut k = CommandList::load(Arc::from(vec![push(0)]));
        assert!(!k.ends_with(&block));
        k.append_block(copy);
        assert!(k.ends_with(&block));
        k.advance();
        k.advance();
        assert!(!k.ends_with(&block), "partially executed block is not a full suffix");
        assert!(CommandList::default().ends_with(&Arc::from(Vec::new())));
    }

    #[test]
    fn equality_ignores_framing() {
        let a = CommandList::load(Arc::from(vec![push(1), push(2)]));
        let mut b = CommandList::load(Arc::from(vec![push(1)]));
        b.append_block(Arc::from(vec![push(2)]));
        assert_eq!(a, b);
    }
}
