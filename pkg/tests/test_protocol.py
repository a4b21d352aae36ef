import io
import json
import math
import socket
import sys
import threading
import time

import pytest
from hypothesis import given, strategies as st

from synteval.corpus import Corpus
from synteval.ngram import save_model, train_ngram
from synteval.protocol import (
    ErrorMessage,
    MessageReader,
    ProtocolError,
    RemoteScorer,
    ResultMessage,
    ScoreMessage,
    ScorerClient,
    ScorerHello,
    decode_message,
    encode_message,
    serve,
    vocabulary_digest,
)
from synteval.scoring import CAUSAL, OOVError, ScoreRequest, UniformScorer

from conftest import synthetic_corpus

token_st = st.text(min_size=1, max_size=6).filter(lambda s: s.strip() == s and s)


@given(
    st.integers(min_value=1, max_value=10**6),
    st.sampled_from(["causal", "masked"]),
    st.lists(token_st, max_size=12).map(tuple),
    token_st,
    st.lists(token_st, max_size=6).map(tuple),
)
def test_score_message_round_trip(msg_id, mode, left, target, right):
    message = ScoreMessage(msg_id, mode, left, target, right)
    assert decode_message(encode_message(message)) == message


def test_result_and_error_round_trip():
    result = ResultMessage(3, -1.5)
    assert decode_message(encode_message(result)) == result
    untouched = ResultMessage(4, math.log(0.123456789))
    assert decode_message(encode_message(untouched)).log_prob == untouched.log_prob
    error = ErrorMessage(7, "oov", "target token 'x' is not in the scorer's vocabulary")
    assert decode_message(encode_message(error)) == error


def test_hello_round_trip_and_validation():
    hello = ScorerHello("ngram3-k1", ("causal",), vocabulary_digest(["a", "b"]), 64)
    assert decode_message(encode_message(hello)) == hello
    with pytest.raises(ProtocolError):
        ScorerHello("x", (), "", 1)
    with pytest.raises(ProtocolError):
        ScorerHello("x", ("bidirectional",), "", 1)


def test_bare_query_line_decodes_as_score_message():
    line = b'{"id":1,"mode":"causal","left":["Who","did","you","say","that"],"target":"loves"}'
    message = decode_message(line)
    assert message == ScoreMessage(
        1, "causal", ("Who", "did", "you", "say", "that"), "loves", ()
    )


def test_unknown_fields_ignored():
    line = b'{"type":"result","id":2,"log_prob":-1.0,"experimental":true}'
    assert decode_message(line) == ResultMessage(2, -1.0)


def test_malformed_line_reports_byte_offset():
    good_line = b'{"type":"result","id":1,"log_prob":-1}\n'
    reader = MessageReader(io.BytesIO(good_line + b"not json\n"))
    first = reader.read()
    assert isinstance(first, ResultMessage)
    with pytest.raises(ProtocolError) as err:
        reader.read()
    assert err.value.offset == len(good_line)
    assert str(len(good_line)) in str(err.value)


def _serve_in_thread(scorer, vocabulary=None):
    client_sock, server_sock = socket.socketpair()
    server_in = server_sock.makefile("rb")
    server_out = server_sock.makefile("wb")

    def run():
        try:
            serve(scorer, server_in, server_out, vocabulary)
        finally:
            server_out.close()
            server_sock.close()

    thread = threading.Thread(target=run, daemon=True)
    thread.start()
    return ScorerClient(client_sock.makefile("rb"), client_sock.makefile("wb"), sock=client_sock), thread


def test_session_oov_isolated_per_request():
    model = train_ngram(Corpus((("a", "b"), ("a", "c"))), order=2, k=1)
    client, thread = _serve_in_thread(model, model.vocabulary)
    assert client.hello.scorer_id == model.scorer_id
    assert client.hello.modes == (CAUSAL,)
    requests = [
        ScoreRequest(CAUSAL, ("a",), "b"),
        ScoreRequest(CAUSAL, ("a",), "zebra"),
        ScoreRequest(CAUSAL, ("a",), "c"),
    ]
    responses = client.batch_score(requests)
    assert isinstance(responses[0], ResultMessage)
    assert isinstance(responses[1], ErrorMessage) and responses[1].code == "oov"
    assert isinstance(responses[2], ResultMessage)
    # session still works after the per-request error
    again = client.batch_score([ScoreRequest(CAUSAL, ("a",), "b")])
    assert isinstance(again[0], ResultMessage)
    assert again[0].log_prob == responses[0].log_prob
    client.close()
    thread.join(timeout=5)


def test_session_survives_malformed_line():
    scorer = UniformScorer(9)
    client_sock, server_sock = socket.socketpair()
    thread = threading.Thread(
        target=serve,
        args=(scorer, server_sock.makefile("rb"), server_sock.makefile("wb")),
        daemon=True,
    )
    thread.start()
    reader = MessageReader(client_sock.makefile("rb"))
    writer = client_sock.makefile("wb")
    assert isinstance(reader.read(), ScorerHello)
    writer.write(b"garbage line\n")
    writer.write(encode_message(ScoreMessage(1, CAUSAL, ("x",), "y", ())))
    writer.flush()
    first = reader.read()
    assert isinstance(first, ErrorMessage) and first.code == "protocol"
    assert first.offset is not None
    second = reader.read()
    assert isinstance(second, ResultMessage) and second.id == 1
    writer.close()
    client_sock.close()
    thread.join(timeout=5)


def test_client_resequences_out_of_order_responses():
    client_sock, server_sock = socket.socketpair()

    def fake_server():
        infile = server_sock.makefile("rb")
        outfile = server_sock.makefile("wb")
        outfile.write(encode_message(ScorerHello("fake", (CAUSAL,), "", 16)))
        outfile.flush()
        reader = MessageReader(infile)
        batch = [reader.read(), reader.read()]
        # answer in reverse order
        for message in reversed(batch):
            outfile.write(encode_message(ResultMessage(message.id, -float(message.id))))
        outfile.flush()
        outfile.close()

    thread = threading.Thread(target=fake_server, daemon=True)
    thread.start()
    client = ScorerClient(client_sock.makefile("rb"), client_sock.makefile("wb"), sock=client_sock)
    responses = client.batch_score(
        [ScoreRequest(CAUSAL, (), "a"), ScoreRequest(CAUSAL, (), "b")]
    )
    assert [r.id for r in responses] == [1, 2]
    assert [r.log_prob for r in responses] == [-1.0, -2.0]
    client.close()
    thread.join(timeout=5)


def test_remote_scorer_matches_in_process_bitwise():
    corpus = synthetic_corpus(300, seed=17)
    model = train_ngram(corpus, order=2, k=0.5)
    client, thread = _serve_in_thread(model, model.vocabulary)
    remote = RemoteScorer(client)
    assert remote.scorer_id == model.scorer_id
    vocab = sorted(model.vocabulary)[:40]
    requests = [
        ScoreRequest(CAUSAL, tuple(vocab[i : i + 3]), vocab[(i * 7) % len(vocab)])
        for i in range(200)
    ]
    local = [r.log_probability for r in model.score_batch(requests)]
    served = [r.log_probability for r in remote.score_batch(requests)]
    assert served == local  # bit-identical through the JSON wire
    client.close()
    thread.join(timeout=5)


def test_remote_scorer_raises_oov_with_token():
    model = train_ngram(Corpus((("a", "b"),)), order=2, k=1)
    client, thread = _serve_in_thread(model, model.vocabulary)
    remote = RemoteScorer(client)
    with pytest.raises(OOVError, match="zebra"):
        remote.score_batch([ScoreRequest(CAUSAL, ("a",), "zebra")])
    with pytest.raises(OOVError) as err:
        remote.score_batch([ScoreRequest(CAUSAL, ("a",), "John's")])
    assert err.value.token == "John's"
    client.close()
    thread.join(timeout=5)


def test_server_rejects_unsupported_mode_per_request():
    model = train_ngram(Corpus((("a", "b"),)), order=2, k=1)
    client, thread = _serve_in_thread(model, model.vocabulary)
    writer = client._out
    writer.write(encode_message(ScoreMessage(1, "masked", ("a",), "b", ("x",))))
    writer.write(encode_message(ScoreMessage(2, CAUSAL, ("a",), "b", ())))
    writer.flush()
    first = client._in.read()
    second = client._in.read()
    assert isinstance(first, ErrorMessage) and first.code == "scorer" and first.id == 1
    assert isinstance(second, ResultMessage) and second.id == 2
    client.close()
    thread.join(timeout=5)


def test_remote_scorer_honours_max_batch():
    class TinyBatchScorer(UniformScorer):
        max_batch = 2

    client, thread = _serve_in_thread(TinyBatchScorer(5))
    remote = RemoteScorer(client)
    assert remote.max_batch == 2
    responses = remote.score_batch([ScoreRequest(CAUSAL, (), "t")] * 5)
    assert len(responses) == 5
    client.close()
    thread.join(timeout=5)


def test_spawned_subprocess_server_round_trip(tmp_path):
    corpus = synthetic_corpus(100, seed=19)
    model = train_ngram(corpus, order=2, k=1)
    model_path = tmp_path / "m.json"
    save_model(model, model_path)
    client = ScorerClient.spawn(
        [sys.executable, "-m", "synteval.cli", "serve", "--model", str(model_path)]
    )
    try:
        assert client.hello.scorer_id == model.scorer_id
        assert client.hello.vocab_digest == vocabulary_digest(model.vocabulary)
        token = sorted(model.vocabulary)[0]
        response = client.batch_score([ScoreRequest(CAUSAL, (), token)])[0]
        assert isinstance(response, ResultMessage)
        assert response.log_prob == model.log_prob((), token)
    finally:
        client.close()


def test_encode_is_single_line_json():
    data = encode_message(ScoreMessage(1, CAUSAL, ("a",), "b", ()))
    assert data.endswith(b"\n") and data.count(b"\n") == 1
    json.loads(data)


def test_tcp_transport_round_trip():
    from synteval.protocol import serve_tcp

    corpus = synthetic_corpus(50, seed=23)
    model = train_ngram(corpus, order=2, k=1)
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    thread = threading.Thread(
        target=serve_tcp, args=(model, port), kwargs={"vocabulary": model.vocabulary},
        daemon=True,
    )
    thread.start()
    client = None
    for _ in range(50):  # wait for the listener to come up
        try:
            client = ScorerClient.connect("127.0.0.1", port)
            break
        except ConnectionRefusedError:
            time.sleep(0.05)
    assert client is not None, "TCP server never accepted"
    token = sorted(model.vocabulary)[0]
    response = client.batch_score([ScoreRequest(CAUSAL, (), token)])[0]
    assert isinstance(response, ResultMessage)
    assert response.log_prob == model.log_prob((), token)
    client.close()
