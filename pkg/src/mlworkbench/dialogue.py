"""Question/answer channels used by the chatbot flows.

A dialogue is anything with ``say(text)`` and ``ask(prompt) -> str``.
The terminal REPL wires these to stdout/stdin; the network API feeds
answers from posted messages; tests use a scripted list of answers.
"""

from __future__ import annotations


class ScriptExhausted(RuntimeError):
    """A scripted dialogue had no answer left for a prompt."""


class Dialogue:
    """Base channel; subclasses override ask (and usually say)."""

    def say(self, text: str) -> None:
        pass

    def ask(self, prompt: str) -> str:
        raise NotImplementedError


class StdioDialogue(Dialogue):
    """Terminal dialogue: say prints, ask blocks on stdin."""

    def say(self, text: str) -> None:
        print(text)

    def ask(self, prompt: str) -> str:
        return input(prompt + "\n>")


class ScriptedDialogue(Dialogue):
    """Replays a fixed list of answers; records the full transcript."""

    def __init__(self, answers, echo: bool = False):
        self.answers = list(answers)
        self.echo = echo
        self.transcript = []   # (prompt_or_text, answer_or_None)

    def say(self, text: str) -> None:
        self.transcript.append((text, None))
        if self.echo:
            print(text)

    def ask(self, prompt: str) -> str:
        if not self.answers:
            raise ScriptExhausted(
                f"scripted dialogue ran out of answers at: {prompt!r}")
        answer = self.answers.pop(0)
        self.transcript.append((prompt, answer))
        if self.echo:
            print(f"{prompt}\n>{answer}")
        return answer
