import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the integration suite boots the Python service and parses a PDF
    testTimeout: 120_000,
    hookTimeout: 180_000,
    // one server, one port: keep test files sequential
    fileParallelism: false,
  },
});
