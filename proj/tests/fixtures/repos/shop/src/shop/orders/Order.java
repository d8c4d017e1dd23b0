package shop.orders;

import java.util.List;

public class Order {
    private String id;
    private List<String> items;
    private double total;

    public Order(String id, List<String> items) {
        this.id = id;
        this.items = items;
    }

    public String getId() {
        return id;
    }

    public double computeTotal() {
        total = items.size() * 10.0;
        return total;
    }
}
