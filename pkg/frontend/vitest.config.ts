import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // e2e spawns the Python service and waits for fixture load.
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
