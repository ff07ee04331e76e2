/**
 * Thin relay: bridges the engine's newline-delimited JSON TCP stream to a
 * browser WebSocket, both directions verbatim (same message schema), and
 * serves the static dashboard files.
 *
 *   node dist/relay.js [--engine 127.0.0.1:7788] [--http 8080]
 *
 * Each WebSocket client gets its own TCP connection to the engine, so
 * acks reach the client that issued the command while stats (broadcast by
 * the engine per connection) flow to everyone.
 */

import { createReadStream, existsSync, statSync } from "node:fs";
import { createServer as createHttpServer, IncomingMessage, ServerResponse } from "node:http";
import { createConnection, Socket } from "node:net";
import { dirname, extname, join, normalize } from "node:path";
import { fileURLToPath } from "node:url";

import { WebSocket, WebSocketServer } from "ws";

const MIME: Record<string, string> = {
  ".html": "text/html",
  ".js": "text/javascript",
  ".map": "application/json",
  ".css": "text/css",
};

export interface RelayOptions {
  engineHost: string;
  enginePort: number;
  httpPort: number;
  staticRoot?: string;
}

/** Split a TCP byte stream into newline-delimited frames. */
export function makeLineSplitter(onLine: (line: string) => void): (chunk: Buffer) => void {
  let buffer = "";
  return (chunk: Buffer) => {
    buffer += chunk.toString("utf-8");
    let idx;
    while ((idx = buffer.indexOf("\n")) >= 0) {
      const line = buffer.slice(0, idx).trim();
      buffer = buffer.slice(idx + 1);
      if (line) onLine(line);
    }
  };
}

function bridge(ws: WebSocket, engineHost: string, enginePort: number): Socket {
  const tcp = createConnection({ host: engineHost, port: enginePort });
  tcp.on("data", makeLineSplitter((line) => {
    if (ws.readyState === WebSocket.OPEN) ws.send(line);
  }));
  tcp.on("error", () => ws.close(1011, "engine unreachable"));
  tcp.on("close", () => ws.close(1000, "engine closed"));
  ws.on("message", (data) => {
    tcp.write(data.toString() + "\n");
  });
  ws.on("close", () => tcp.destroy());
  return tcp;
}

export function startRelay(opts: RelayOptions) {
  const root = opts.staticRoot ?? join(dirname(fileURLToPath(import.meta.url)), "..");

  const http = createHttpServer((req: IncomingMessage, res: ServerResponse) => {
    const url = (req.url ?? "/").split("?")[0];
    const rel = url === "/" ? "index.html" : url.slice(1);
    const path = normalize(join(root, rel));
    if (!path.startsWith(normalize(root)) || !existsSync(path) || !statSync(path).isFile()) {
      res.writeHead(404);
      res.end("not found");
      return;
    }
    res.writeHead(200, { "content-type": MIME[extname(path)] ?? "application/octet-stream" });
    createReadStream(path).pipe(res);
  });

  const wss = new WebSocketServer({ server: http, path: "/ws" });
  wss.on("connection", (ws) => bridge(ws, opts.engineHost, opts.enginePort));

  http.listen(opts.httpPort);
  return { http, wss };
}

function parseArgs(argv: string[]): RelayOptions {
  let engine = "127.0.0.1:7788";
  let httpPort = 8080;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--engine") engine = argv[++i];
    if (argv[i] === "--http") httpPort = Number(argv[++i]);
  }
  const [host, port] = engine.split(":");
  return { engineHost: host, enginePort: Number(port), httpPort };
}

const isMain = process.argv[1] && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isMain) {
  const opts = parseArgs(process.argv.slice(2));
  startRelay(opts);
  console.log(`dashboard on http://127.0.0.1:${opts.httpPort} -> engine ${opts.engineHost}:${opts.enginePort}`);
}
