// Global setup: boot the real Python service on a fixture corpus + model so
// the e2e suite exercises the documented HTTP API, not a mock.

import { execFileSync, spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, dirname } from 'node:path';
import { fileURLToPath } from 'node:url';

const PORT = 8942;
const BASE = `http://127.0.0.1:${PORT}`;

async function waitForService(child: ChildProcess): Promise<void> {
    const deadline = Date.now() + 30_000;
    while (Date.now() < deadline) {
        if (child.exitCode !== null) {
            throw new Error(`service exited early with code ${child.exitCode}`);
        }
        try {
            const response = await fetch(`${BASE}/v1/healthz`);
            if (response.ok) {
                return;
            }
        } catch {
            // not up yet
        }
        await new Promise((resolve) => setTimeout(resolve, 200));
    }
    throw new Error('service did not become healthy within 30s');
}

export default async function setup(): Promise<() => Promise<void>> {
    const here = dirname(fileURLToPath(import.meta.url));
    const fixtureScript = join(here, '..', 'fixtures', 'make_service_fixture.py');
    const dir = mkdtempSync(join(tmpdir(), 'ifind-e2e-'));
    execFileSync('python3', [fixtureScript, dir, String(PORT)]);
    const child = spawn('python3', ['-m', 'ifind.cli', 'serve', '--config', join(dir, 'ifind.conf')], {
        stdio: 'ignore',
    });
    await waitForService(child);
    process.env['IFIND_E2E_URL'] = BASE;
    return async () => {
        child.kill('SIGTERM');
        rmSync(dir, { recursive: true, force: true });
    };
}
