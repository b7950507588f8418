import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    testTimeout: 10_000,
    hookTimeout: 30_000,
    // The closed-loop test drives a live service on a wall-clock cadence
    // and counts telemetry frames between events; running files one at a
    // time keeps event-loop jitter out of those counts.
    fileParallelism: false,
  },
});
