"""Newline-delimited JSON protocol for external probability scorers.

One logical session per scorer process. The server speaks first with a
``hello`` naming its id, supported modes, vocabulary digest, and maximum
batch size; the client then pipelines ``score`` requests and re-sequences
responses by id. Log-probabilities are natural log on the wire; scorers
working in other bases convert before responding.

Message shapes (UTF-8 JSON, one per line; unknown fields are ignored):

    {"type": "hello", "scorer_id": "...", "modes": ["causal"],
     "vocab_digest": "sha256:...", "max_batch": 64}
    {"type": "score", "id": 1, "mode": "causal",
     "left": ["Who", "did", "you", "say", "that"], "target": "loves",
     "right": []}
    {"type": "result", "id": 1, "log_prob": -3.5}
    {"type": "error", "id": 1, "code": "oov", "message": "..."}

A ``score`` line may omit ``type`` (inferred from ``target``) and ``right``
(defaults to empty). An error response carries the id of the request it
answers; protocol-level errors (unparsable line) carry ``id: null`` plus the
byte offset of the offending line, and the session stays usable. One
request's failure never aborts the rest of its batch.
"""

from __future__ import annotations

import hashlib
import json
import socket
import subprocess
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .scoring import CAUSAL, MODES, OOVError, Scorer, ScoreRequest, ScoreResult


class ProtocolError(Exception):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)


@dataclass(frozen=True)
class ScorerHello:
    scorer_id: str
    modes: tuple[str, ...]
    vocab_digest: str
    max_batch: int

    def __post_init__(self) -> None:
        if not self.modes or any(m not in MODES for m in self.modes):
            raise ProtocolError(f"hello must declare a non-empty subset of {MODES}")


@dataclass(frozen=True)
class ScoreMessage:
    id: int
    mode: str
    left: tuple[str, ...]
    target: str
    right: tuple[str, ...] = ()


@dataclass(frozen=True)
class ResultMessage:
    id: int
    log_prob: float


@dataclass(frozen=True)
class ErrorMessage:
    id: int | None
    code: str
    message: str
    offset: int | None = None


Message = ScorerHello | ScoreMessage | ResultMessage | ErrorMessage


def vocabulary_digest(vocabulary: Iterable[str]) -> str:
    h = hashlib.sha256()
    for token in sorted(vocabulary):
        h.update(token.encode("utf-8"))
        h.update(b"\n")
    return f"sha256:{h.hexdigest()}"


def encode_message(message: Message) -> bytes:
    if isinstance(message, ScorerHello):
        payload = {
            "type": "hello",
            "scorer_id": message.scorer_id,
            "modes": list(message.modes),
            "vocab_digest": message.vocab_digest,
            "max_batch": message.max_batch,
        }
    elif isinstance(message, ScoreMessage):
        payload = {
            "type": "score",
            "id": message.id,
            "mode": message.mode,
            "left": list(message.left),
            "target": message.target,
            "right": list(message.right),
        }
    elif isinstance(message, ResultMessage):
        payload = {"type": "result", "id": message.id, "log_prob": message.log_prob}
    elif isinstance(message, ErrorMessage):
        payload = {
            "type": "error",
            "id": message.id,
            "code": message.code,
            "message": message.message,
        }
        if message.offset is not None:
            payload["offset"] = message.offset
    else:
        raise ProtocolError(f"cannot encode {type(message).__name__}")
    return json.dumps(payload, ensure_ascii=False).encode("utf-8") + b"\n"


def decode_message(line: bytes, offset: int = 0) -> Message:
    """Parse one line; raises ProtocolError carrying the line's byte offset."""
    try:
        data = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"malformed protocol line: {exc}", offset) from None
    if not isinstance(data, dict):
        raise ProtocolError("protocol line is not a JSON object", offset)
    kind = data.get("type")
    if kind is None and "target" in data:
        kind = "score"
    try:
        if kind == "hello":
            return ScorerHello(
                scorer_id=data["scorer_id"],
                modes=tuple(data["modes"]),
                vocab_digest=data.get("vocab_digest", ""),
                max_batch=int(data.get("max_batch", 1)),
            )
        if kind == "score":
            return ScoreMessage(
                id=int(data["id"]),
                mode=data.get("mode", CAUSAL),
                left=tuple(data.get("left", ())),
                target=data["target"],
                right=tuple(data.get("right", ())),
            )
        if kind == "result":
            return ResultMessage(id=int(data["id"]), log_prob=float(data["log_prob"]))
        if kind == "error":
            return ErrorMessage(
                id=data.get("id"),
                code=data.get("code", "error"),
                message=data.get("message", ""),
                offset=data.get("offset"),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"bad {kind!r} message: {exc}", offset) from None
    raise ProtocolError(f"unknown message type {kind!r}", offset)


class MessageReader:
    """Line reader over a binary stream that tracks cumulative byte offsets."""

    def __init__(self, stream: IO[bytes]):
        self.stream = stream
        self.offset = 0

    def read(self) -> Message | None:
        """Next message, or None at end of stream."""
        line = self.stream.readline()
        if not line:
            return None
        start = self.offset
        self.offset += len(line)
        if not line.strip():
            return self.read()
        return decode_message(line, start)


# --- server -------------------------------------------------------------------


def scorer_hello(scorer: Scorer, vocabulary: Iterable[str] | None = None, max_batch: int = 64) -> ScorerHello:
    digest = vocabulary_digest(vocabulary) if vocabulary is not None else ""
    return ScorerHello(
        scorer_id=scorer.scorer_id,
        modes=(scorer.mode,),
        vocab_digest=digest,
        max_batch=scorer.max_batch or max_batch,
    )


def serve(scorer: Scorer, infile: IO[bytes], outfile: IO[bytes],
          vocabulary: Iterable[str] | None = None) -> None:
    """Answer score messages until end of input. Per-request failures produce
    error responses; undecodable lines produce id-less protocol errors; the
    loop survives both."""
    outfile.write(encode_message(scorer_hello(scorer, vocabulary)))
    outfile.flush()
    reader = MessageReader(infile)
    while True:
        try:
            message = reader.read()
        except ProtocolError as exc:
            outfile.write(
                encode_message(
                    ErrorMessage(None, "protocol", str(exc), offset=exc.offset)
                )
            )
            outfile.flush()
            continue
        if message is None:
            return
        if not isinstance(message, ScoreMessage):
            outfile.write(
                encode_message(
                    ErrorMessage(None, "protocol", f"unexpected {type(message).__name__}")
                )
            )
            outfile.flush()
            continue
        if message.mode != scorer.mode:
            outfile.write(
                encode_message(
                    ErrorMessage(
                        message.id,
                        "scorer",
                        f"mode {message.mode!r} is not supported by this backend",
                    )
                )
            )
            outfile.flush()
            continue
        request = ScoreRequest(
            mode=message.mode,
            left_context=message.left,
            target=message.target,
            right_context=message.right,
        )
        try:
            result = scorer.score_batch([request])[0]
            response: Message = ResultMessage(message.id, result.log_probability)
        except OOVError as exc:
            response = ErrorMessage(message.id, "oov", str(exc))
        except Exception as exc:  # isolate scorer faults per request
            response = ErrorMessage(message.id, "scorer", str(exc))
        outfile.write(encode_message(response))
        outfile.flush()


def serve_tcp(scorer: Scorer, port: int, host: str = "127.0.0.1",
              vocabulary: Iterable[str] | None = None) -> None:
    """Accept one connection at a time, each a full session."""
    with socket.create_server((host, port)) as server:
        while True:
            conn, _ = server.accept()
            with conn:
                infile = conn.makefile("rb")
                outfile = conn.makefile("wb")
                try:
                    serve(scorer, infile, outfile, vocabulary)
                except (BrokenPipeError, ConnectionResetError):
                    pass


# --- client -------------------------------------------------------------------


class ScorerClient:
    """One session against a served scorer, over child-process pipes or TCP."""

    def __init__(self, infile: IO[bytes], outfile: IO[bytes], process=None, sock=None):
        self._in = MessageReader(infile)
        self._out = outfile
        self._process = process
        self._sock = sock
        self._next_id = 1
        hello = self._in.read()
        if not isinstance(hello, ScorerHello):
            raise ProtocolError("server did not open with a hello message")
        self.hello = hello

    @classmethod
    def spawn(cls, argv: Sequence[str]) -> "ScorerClient":
        process = subprocess.Popen(
            list(argv), stdin=subprocess.PIPE, stdout=subprocess.PIPE
        )
        assert process.stdin is not None and process.stdout is not None
        return cls(process.stdout, process.stdin, process=process)

    @classmethod
    def connect(cls, host: str, port: int) -> "ScorerClient":
        sock = socket.create_connection((host, port))
        return cls(sock.makefile("rb"), sock.makefile("wb"), sock=sock)

    def batch_score(
        self, requests: Sequence[ScoreRequest]
    ) -> list[ResultMessage | ErrorMessage]:
        """Send up to max_batch requests; responses come back in request order
        regardless of the order the server answered in."""
        if len(requests) > self.hello.max_batch:
            raise ProtocolError(
                f"batch of {len(requests)} exceeds server max_batch {self.hello.max_batch}"
            )
        ids = []
        for request in requests:
            message = ScoreMessage(
                id=self._next_id,
                mode=request.mode,
                left=tuple(request.left_context),
                target=request.target,
                right=tuple(request.right_context),
            )
            self._next_id += 1
            ids.append(message.id)
            self._out.write(encode_message(message))
        self._out.flush()
        by_id: dict[int, ResultMessage | ErrorMessage] = {}
        pending = set(ids)
        while pending:
            message = self._in.read()
            if message is None:
                raise ProtocolError("session closed with responses outstanding")
            if isinstance(message, (ResultMessage, ErrorMessage)):
                if message.id in pending:
                    by_id[message.id] = message
                    pending.discard(message.id)
                elif message.id is None:
                    raise ProtocolError(f"server protocol error: {message.message}")
            else:
                raise ProtocolError(f"unexpected {type(message).__name__} mid-session")
        return [by_id[i] for i in ids]

    def close(self) -> None:
        try:
            self._out.close()
        except Exception:
            pass
        if self._sock is not None:
            # Closing the makefile alone keeps the socket open; shut the write
            # half down so the server sees end of input.
            try:
                self._sock.shutdown(socket.SHUT_WR)
            except OSError:
                pass
        if self._process is not None:
            self._process.wait(timeout=10)
        try:
            self._in.stream.close()
        except Exception:
            pass
        if self._sock is not None:
            self._sock.close()

    def __enter__(self) -> "ScorerClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class RemoteScorer(Scorer):
    """Adapter exposing a protocol session through the in-process Scorer contract."""

    def __init__(self, client: ScorerClient, mode: str | None = None):
        self.client = client
        self.scorer_id = client.hello.scorer_id
        requested = mode or client.hello.modes[0]
        if requested not in client.hello.modes:
            raise ProtocolError(
                f"server {self.scorer_id!r} does not support mode {requested!r}"
            )
        self.mode = requested
        self.max_batch = client.hello.max_batch

    def score_batch(self, requests: Sequence[ScoreRequest]) -> list[ScoreResult]:
        results: list[ScoreResult] = []
        for lo in range(0, len(requests), self.max_batch):
            for response in self.client.batch_score(requests[lo : lo + self.max_batch]):
                if isinstance(response, ErrorMessage):
                    if response.code == "oov":
                        # Message already names the token; recover it for the exception.
                        raise OOVError(_oov_token(response.message), detail="remote scorer")
                    raise ProtocolError(
                        f"remote scorer error ({response.code}): {response.message}"
                    )
                results.append(ScoreResult(response.log_prob))
        return results


def _oov_token(message: str) -> str:
    # Server OOV messages read: target token '...' is not in the scorer's
    # vocabulary. The quote style varies (repr double-quotes tokens that
    # contain apostrophes); match greedily so such tokens survive intact.
    import re

    m = re.search(r"""target token ['"](.*)['"] is not""", message)
    return m.group(1) if m else message
