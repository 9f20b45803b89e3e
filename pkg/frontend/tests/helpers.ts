import { readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export function serviceBase(): string {
  if (process.env.NTRL_TEST_BASE) return process.env.NTRL_TEST_BASE;
  return readFileSync(join(tmpdir(), "ntrl-ui-test-base.txt"), "utf-8").trim();
}

export async function until(check: () => boolean, label: string, tries = 200): Promise<void> {
  for (let i = 0; i < tries; i++) {
    if (check()) return;
    await new Promise(r => setTimeout(r, 50));
  }
  throw new Error(`timed out waiting for ${label}`);
}
