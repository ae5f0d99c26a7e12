import { defineConfig } from "vitest/config";

// every binding call spawns the CLI, so the parity suite needs room
export default defineConfig({
  test: {
    testTimeout: 300_000,
    hookTimeout: 300_000,
  },
});
