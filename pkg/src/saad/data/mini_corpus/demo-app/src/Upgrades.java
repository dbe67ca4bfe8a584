package demo.upgrades;

public class Upgrades {

    // Must develop a strategy for upgrading from older
    // SubscriptionWrapper versions to newer versions.
    public void migrateWrappers() {
    }

    public String diffMode() {
        // we'll probably have to remove 'diff 0' after upgrading to
        // lucene 3.1.
        return "diff 0";
    }

    // Some of these internal IDs are outdated and don't represent
    // what these challenges do.
    public int[] challengeIds() {
        return new int[] {3, 7};
    }

    public void refreshIndexes() {
        // This is pretty old code and might need some upgrades.
        rebuildAll();
    }

    private void rebuildAll() {
        // this macro is not needed in ES6
        String shim = "Object.assign";
        // deprecated in MySQL 5.7.11 and MySQL 8.0.0.
        String sqlMode = "NO_AUTO_CREATE_USER";
        consume(shim, sqlMode);
    }

    private void consume(String a, String b) {
    }
}
