"""Live training engine: a pausable training loop steered over a socket.

Wire protocol (newline-delimited JSON over a local TCP stream):

  control  {"cmd": "configure"|"start"|"pause"|"resume"|"stop"|"set_hyper",
            "key": <str, set_hyper only>, "value": <any>, "id": <int>}
  ack      {"ack": <id>, "ok": <bool>, "reason": <str, on failure>}
  stats    {"event": "stats", "samples_seen": int, "loss": float,
            "train_acc": float, "test_acc": float, "per_class_f1": [10 floats],
            "lr": float, "momentum": float, "optimizer": str, "seed": int}
  state    {"event": "state", "state": "idle"|"running"|"paused"|"stopped",
            "samples_seen": int}
  error    {"event": "error", "reason": str}

Control messages are applied only between batches; ``set_hyper`` therefore
takes effect at the next batch boundary and is echoed by the next stats
event. ``configure`` accepts a config object in "value" (fields of
train.RunConfig, plus "checkpoint_path" written when the run stops) and is
only valid while idle or stopped. A malformed line yields an error event
and the loop carries on.

Stats delivery never blocks training: each client has a bounded stats
queue (drop-oldest, drops counted and reported in state events); acks and
errors use an unbounded priority queue.

Accuracies are fractions in [0, 1]; per_class_f1 is in percent. An engine
fed no control traffic steps through the exact same code path as a
headless run, so checkpoints agree bit for bit.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
from collections import deque
from dataclasses import fields

from .errors import DesknetError
from .train import RunConfig, TrainingSession

STATS_QUEUE_LIMIT = 256
UNLIMITED_BUDGET = 10**12  # "run until stopped"


def stats_event(session: TrainingSession) -> dict:
    point = session.series[-1]
    rep = session.last_eval[1]
    return {
        "event": "stats",
        "samples_seen": point.samples_seen,
        "loss": point.loss,
        "train_acc": point.train_acc,
        "test_acc": point.test_acc,
        "per_class_f1": list(rep.f1) if rep is not None else [0.0] * 10,
        "lr": session.hp.lr,
        "momentum": session.hp.momentum,
        "optimizer": session.optimizer.name,
        "seed": session.cfg.seed,
    }


class Client:
    """One connection: a reader loop plus a non-blocking writer thread."""

    def __init__(self, conn: socket.socket, addr):
        self.conn = conn
        self.addr = addr
        self.alive = True
        self._priority: deque = deque()
        self._stats: deque = deque()
        self.dropped = 0
        self._cv = threading.Condition()
        self._writer = threading.Thread(target=self._write_loop, daemon=True)
        self._writer.start()

    def send(self, obj: dict, priority: bool = False):
        with self._cv:
            if not self.alive:
                return
            if priority:
                self._priority.append(obj)
            else:
                if len(self._stats) >= STATS_QUEUE_LIMIT:
                    self._stats.popleft()
                    self.dropped += 1
                self._stats.append(obj)
            self._cv.notify()

    def _next_out(self):
        if self._priority:
            return self._priority.popleft()
        if self._stats:
            return self._stats.popleft()
        return None

    def _write_loop(self):
        while True:
            with self._cv:
                while self.alive and not self._priority and not self._stats:
                    self._cv.wait(timeout=0.5)
                if not self.alive and not self._priority and not self._stats:
                    return
                obj = self._next_out()
            if obj is None:
                continue
            try:
                self.conn.sendall((json.dumps(obj) + "\n").encode())
            except OSError:
                self.close()
                return

    def close(self):
        with self._cv:
            self.alive = False
            self._cv.notify_all()
        try:
            self.conn.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.conn.close()


class LiveEngine(threading.Thread):
    """The training loop thread; consumes controls, emits stats."""

    def __init__(self, server: "EngineServer", stats_every: int, data_dir: str):
        super().__init__(daemon=True)
        self.server = server
        self.stats_every = stats_every
        self.data_dir = data_dir
        self.controls: queue.Queue = queue.Queue()
        self.state = "idle"
        self.session: TrainingSession | None = None
        self.checkpoint_path = None
        self.last_stats = None
        self._next_stats = 0
        self._shutdown = False

    # -- command handling --------------------------------------------------

    def submit(self, client: Client, msg: dict):
        self.controls.put((client, msg))

    def _ack(self, client, msg, ok, reason=None):
        out = {"ack": msg.get("id"), "ok": ok}
        if reason:
            out["reason"] = str(reason)
        client.send(out, priority=True)

    def _broadcast_state(self):
        n = self.session.samples_seen if self.session else 0
        for c in self.server.clients_snapshot():
            c.send(
                {"event": "state", "state": self.state, "samples_seen": n,
                 "dropped_stats": c.dropped},
                priority=True,
            )

    def _configure(self, value) -> None:
        if self.state in ("running", "paused"):
            raise DesknetError("cannot configure while a run is active")
        if not isinstance(value, dict):
            raise DesknetError("configure needs a config object in 'value'")
        cfg_dict = dict(value)
        self.checkpoint_path = cfg_dict.pop("checkpoint_path", None)
        cfg_dict.setdefault("data_dir", self.data_dir)
        if cfg_dict.get("epochs") is None and cfg_dict.get("sample_budget") is None:
            cfg_dict["sample_budget"] = UNLIMITED_BUDGET
        known = {f.name for f in fields(RunConfig)}
        unknown = set(cfg_dict) - known
        if unknown:
            raise DesknetError(f"unknown config fields: {sorted(unknown)}")
        cfg = RunConfig(**cfg_dict)
        if cfg.sample_budget is None:
            raise DesknetError("serve mode is sample-budget driven; give sample_budget, not epochs")
        self.session = TrainingSession(cfg)
        self.state = "idle"
        self._next_stats = 0

    def _handle(self, client: Client, msg: dict):
        cmd = msg.get("cmd")
        try:
            if cmd == "configure":
                self._configure(msg.get("value"))
            elif cmd == "start":
                if self.session is None:
                    raise DesknetError("configure before start")
                if self.state in ("running", "paused"):
                    raise DesknetError(f"cannot start while {self.state}")
                if self.state == "stopped":
                    raise DesknetError("run finished; configure a new run first")
                self._begin_run()
            elif cmd == "pause":
                if self.state != "running":
                    raise DesknetError(f"cannot pause while {self.state}")
                self.state = "paused"
            elif cmd == "resume":
                if self.state != "paused":
                    raise DesknetError(f"cannot resume while {self.state}")
                self.state = "running"
            elif cmd == "stop":
                if self.state not in ("running", "paused"):
                    raise DesknetError(f"cannot stop while {self.state}")
                self._finish_run()
            elif cmd == "set_hyper":
                if self.session is None:
                    raise DesknetError("configure before set_hyper")
                if self.state == "stopped":
                    raise DesknetError("run finished; no further batches will apply this change")
                self.session.set_hyper(msg.get("key"), msg.get("value"))
            else:
                raise DesknetError(f"unknown cmd {cmd!r}")
        except (DesknetError, TypeError, ValueError) as e:
            self._ack(client, msg, False, e)
            return
        self._ack(client, msg, True)
        if cmd in ("configure", "start", "pause", "resume", "stop"):
            self._broadcast_state()

    # -- run lifecycle -------------------------------------------------------

    def _begin_run(self):
        self.state = "running"
        if self.session.samples_seen == 0 and not self.session.series:
            acc, _ = self.session.eval_test()
            self.session.record_point(acc)
            self._emit_stats()
            self._next_stats = self.stats_every

    def _emit_stats(self):
        event = stats_event(self.session)
        self.last_stats = event
        for c in self.server.clients_snapshot():
            c.send(event)

    def _finish_run(self):
        self.state = "stopped"
        if self.session and self.checkpoint_path:
            self.session.save_checkpoint(self.checkpoint_path)

    def _step_once(self):
        s = self.session
        try:
            s.step()
        except DesknetError as e:
            for c in self.server.clients_snapshot():
                c.send({"event": "error", "reason": f"diverged: {e}"}, priority=True)
            self._finish_run()
            self._broadcast_state()
            return
        done = s.samples_seen >= s.cfg.sample_budget
        if s.samples_seen >= self._next_stats or done:
            acc, _ = s.eval_test()
            s.record_point(acc)
            self._emit_stats()
            while self._next_stats <= s.samples_seen:
                self._next_stats += self.stats_every
        if done:
            self._finish_run()
            self._broadcast_state()

    # -- main loop -----------------------------------------------------------

    def run(self):
        while not self._shutdown:
            try:
                if self.state == "running":
                    while True:
                        client, msg = self.controls.get_nowait()
                        self._handle(client, msg)
                else:
                    client, msg = self.controls.get(timeout=0.1)
                    self._handle(client, msg)
            except queue.Empty:
                pass
            if self._shutdown:
                return
            if self.state == "running":
                self._step_once()

    def shutdown(self):
        self._shutdown = True


class EngineServer:
    """TCP front door: accepts clients, routes lines to the engine."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 stats_every: int = 2000, data_dir: str = "data"):
        self.sock = socket.create_server((host, port))
        self.address = self.sock.getsockname()
        self.engine = LiveEngine(self, stats_every=stats_every, data_dir=data_dir)
        self._clients: set[Client] = set()
        self._lock = threading.Lock()
        self._accepting = True
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)

    def clients_snapshot(self):
        with self._lock:
            return list(self._clients)

    def start(self):
        self.engine.start()
        self._accept_thread.start()
        return self

    def _accept_loop(self):
        while self._accepting:
            try:
                conn, addr = self.sock.accept()
            except OSError:
                return
            client = Client(conn, addr)
            with self._lock:
                self._clients.add(client)
            client.send(
                {"event": "state", "state": self.engine.state,
                 "samples_seen": self.engine.session.samples_seen if self.engine.session else 0,
                 "dropped_stats": 0},
                priority=True,
            )
            if self.engine.last_stats is not None:
                client.send(self.engine.last_stats)
            threading.Thread(target=self._read_loop, args=(client,), daemon=True).start()

    def _read_loop(self, client: Client):
        try:
            fh = client.conn.makefile("r", encoding="utf-8", newline="\n")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    msg = json.loads(line)
                    if not isinstance(msg, dict) or "cmd" not in msg:
                        raise ValueError("control messages are objects with a 'cmd'")
                except ValueError as e:
                    client.send({"event": "error", "reason": f"malformed message: {e}"},
                                priority=True)
                    continue
                self.engine.submit(client, msg)
        except OSError:
            pass
        finally:
            with self._lock:
                self._clients.discard(client)
            client.close()

    def close(self):
        self._accepting = False
        self.engine.shutdown()
        try:
            self.sock.close()
        except OSError:
            pass
        for c in self.clients_snapshot():
            c.close()
        self.engine.join(timeout=5)


def serve_forever(listen: str, stats_every: int, data_dir: str, log=print):
    """CLI entry: run the engine until interrupted."""
    host, _, port = listen.rpartition(":")
    server = EngineServer(host or "127.0.0.1", int(port), stats_every, data_dir).start()
    log(f"engine listening on {server.address[0]}:{server.address[1]}")
    try:
        while True:
            server.engine.join(timeout=1)
            if not server.engine.is_alive():
                return
    except KeyboardInterrupt:
        log("shutting down")
        server.close()
