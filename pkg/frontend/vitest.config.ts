import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the submission suite starts a real server process
    testTimeout: 120_000,
    hookTimeout: 60_000,
  },
});
